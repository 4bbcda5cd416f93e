//! Predictor-corrector path tracking for the per-cell homotopies.

use num_complex::Complex64;
use num_traits::Zero;

use super::system::CellHomotopy;

const CORRECTOR_TOL: f64 = 1e-10;
const END_RESIDUAL_TOL: f64 = 1e-8;
const STEP_INIT: f64 = 1e-2;
const STEP_MIN: f64 = 1e-14;
const STEP_MAX: f64 = 1e-1;
const DIVERGENCE_NORM: f64 = 1e14;
const NEWTON_ITERS: usize = 3;
const GROWTH_STREAK: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum PathStatus {
    /// The path reached the target system with a small residual.
    Converged,
    /// The step size underflowed or the endpoint failed to polish.
    Failed,
    /// The path norm blew past the divergence bound; the solution escapes
    /// to the boundary of the torus.
    Diverged,
}

pub(crate) struct PathOutcome {
    pub y: Vec<Complex64>,
    pub status: PathStatus,
}

/// Tracks one start solution from the cell's binomial system at `u = 0` to
/// the cut system at `u = 1` with a first-order predictor and a short
/// Newton corrector.
pub(crate) fn track(h: &CellHomotopy, start: Vec<Complex64>) -> PathOutcome {
    let d = h.dim();
    let mut y = start;
    let mut u = 0.0f64;
    let mut step = STEP_INIT;
    let mut streak = 0u32;

    while u < 1.0 {
        if max_norm(&y) > DIVERGENCE_NORM {
            return PathOutcome {
                y,
                status: PathStatus::Diverged,
            };
        }
        let h_step = step.min(1.0 - u);
        let u_next = u + h_step;

        let predicted = predict(h, &y, u, h_step);
        let corrected = predicted.and_then(|mut trial| {
            for _ in 0..NEWTON_ITERS {
                let residual = h.eval(&trial, u_next);
                let jac = h.jacobian(&trial, u_next);
                let delta = solve(jac, residual.iter().map(|r| -r).collect(), d)?;
                let change = max_norm(&delta);
                for (t, dl) in trial.iter_mut().zip(&delta) {
                    *t += dl;
                }
                if !change.is_finite() {
                    return None;
                }
                if change <= CORRECTOR_TOL * max_norm(&trial).max(1.0) {
                    return Some(trial);
                }
            }
            None
        });

        match corrected {
            Some(next) => {
                y = next;
                u = u_next;
                streak += 1;
                if streak >= GROWTH_STREAK {
                    step = (step * 2.0).min(STEP_MAX);
                    streak = 0;
                }
            }
            None => {
                step *= 0.5;
                streak = 0;
                if step < STEP_MIN {
                    return PathOutcome {
                        y,
                        status: PathStatus::Failed,
                    };
                }
            }
        }
    }

    for _ in 0..NEWTON_ITERS {
        let residual = h.eval(&y, 1.0);
        if max_norm_c(&residual) < END_RESIDUAL_TOL {
            break;
        }
        let jac = h.jacobian(&y, 1.0);
        let Some(delta) = solve(jac, residual.iter().map(|r| -r).collect(), d) else {
            break;
        };
        for (t, dl) in y.iter_mut().zip(&delta) {
            *t += dl;
        }
    }

    let status = if max_norm_c(&h.eval(&y, 1.0)) < END_RESIDUAL_TOL {
        PathStatus::Converged
    } else {
        PathStatus::Failed
    };
    PathOutcome { y, status }
}

/// First-order Euler step: solve `J dy = -dH/du` and advance by `h_step`.
fn predict(h: &CellHomotopy, y: &[Complex64], u: f64, h_step: f64) -> Option<Vec<Complex64>> {
    let jac = h.jacobian(y, u);
    let rhs: Vec<Complex64> = h.du(y, u).iter().map(|r| -r).collect();
    let dy = solve(jac, rhs, h.dim())?;
    Some(
        y.iter()
            .zip(&dy)
            .map(|(p, v)| p + v * h_step)
            .collect(),
    )
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn max_norm_c(v: &[Complex64]) -> f64 {
    let m = max_norm(v);
    if m.is_nan() {
        f64::INFINITY
    } else {
        m
    }
}

/// Dense complex solve by Gaussian elimination with partial pivoting.
/// `None` on a numerically singular matrix or non-finite entries.
fn solve(mut a: Vec<Complex64>, mut b: Vec<Complex64>, d: usize) -> Option<Vec<Complex64>> {
    debug_assert_eq!(a.len(), d * d);
    debug_assert_eq!(b.len(), d);
    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&r1, &r2| {
                a[r1 * d + col]
                    .norm()
                    .partial_cmp(&a[r2 * d + col].norm())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        let scale = a[pivot * d + col].norm();
        if !scale.is_finite() || scale < 1e-250 {
            return None;
        }
        if pivot != col {
            for c in 0..d {
                a.swap(col * d + c, pivot * d + c);
            }
            b.swap(col, pivot);
        }
        let inv = a[col * d + col].inv();
        for row in col + 1..d {
            let factor = a[row * d + col] * inv;
            if factor.norm_sqr() == 0.0 {
                continue;
            }
            for c in col..d {
                let delta = factor * a[col * d + c];
                a[row * d + c] -= delta;
            }
            let delta = factor * b[col];
            b[row] -= delta;
        }
    }
    let mut x = vec![Complex64::zero(); d];
    for row in (0..d).rev() {
        let mut acc = b[row];
        for c in row + 1..d {
            acc -= a[row * d + c] * x[c];
        }
        x[row] = acc * a[row * d + row].inv();
        if !x[row].is_finite() {
            return None;
        }
    }
    Some(x)
}
