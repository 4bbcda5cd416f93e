//! The cut system in the free parameters and its per-cell homotopies.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use std::f64::consts::PI;

use crate::binomial::{BinomialSystem, ComponentParametrization, SolutionStructure};
use crate::intlinalg::IntMatrix;
use crate::lpkernel::LiftedPointSet;
use crate::numeric::{big_to_f64, complex_pow};
use crate::subdivision::Cell;

use super::WitnessError;

/// A square sparse polynomial system `F_i(t) = sum_k c_{ik} t^{a_k} = 0` in
/// the free parameters of one solution component: the restriction of `dim`
/// random affine hyperplanes in the original variables. All equations share
/// the support, which is the component's cut support.
pub(crate) struct CutSystem {
    dim: usize,
    support: Vec<Vec<BigInt>>,
    coeffs: Vec<Vec<Complex64>>,
}

impl CutSystem {
    /// Draws hyperplane coefficients of unit modulus from `rng` and folds in
    /// the component's torsion factors so the system lives entirely in the
    /// free parameters.
    pub(crate) fn new(
        structure: &SolutionStructure,
        component: &ComponentParametrization,
        support: Vec<Vec<BigInt>>,
        rng: &mut impl Rng,
    ) -> CutSystem {
        let d = structure.dimension();
        let free = structure.snf().p_0();
        let torsion_part = component.evaluate(&vec![Complex64::one(); d]);

        let position = |col: &[BigInt]| -> usize {
            support
                .iter()
                .position(|a| a.as_slice() == col)
                .expect("every exponent column appears in the cut support")
        };
        let origin = position(&vec![BigInt::zero(); d]);
        let slots: Vec<usize> = (0..free.cols()).map(|v| position(&free.col(v))).collect();

        let mut coeffs = vec![vec![Complex64::zero(); support.len()]; d];
        for row in coeffs.iter_mut() {
            for (xi, &slot) in torsion_part.iter().zip(&slots) {
                row[slot] += unit_coefficient(rng) * xi;
            }
            row[origin] -= unit_coefficient(rng);
        }

        CutSystem {
            dim: d,
            support,
            coeffs,
        }
    }

    /// Largest equation residual at the parameter point `t`.
    pub(crate) fn residual(&self, t: &[Complex64]) -> f64 {
        let monomials: Vec<Complex64> = self
            .support
            .iter()
            .map(|a| monomial(t, a))
            .collect();
        let mut worst = 0.0f64;
        for row in &self.coeffs {
            let mut acc = Complex64::zero();
            for (c, m) in row.iter().zip(&monomials) {
                acc += c * m;
            }
            let r = acc.norm();
            if r.is_nan() || r > worst {
                worst = if r.is_nan() { f64::INFINITY } else { r };
            }
        }
        worst
    }

    /// Builds the homotopy that deforms the cell's start system into the
    /// full cut system, together with its start solutions.
    pub(crate) fn cell_homotopy(
        &self,
        pts: &LiftedPointSet,
        cell: &Cell,
    ) -> Result<(CellHomotopy, Vec<Vec<Complex64>>), WitnessError> {
        let d = self.dim;
        let slack = cell_slacks(pts, cell);
        let scale = slack
            .iter()
            .fold(BigInt::one(), |acc, g| acc.lcm(g.denom()));
        let upow: Vec<f64> = slack
            .iter()
            .map(|g| big_to_f64(&(g * BigRational::from(scale.clone())).to_integer()))
            .collect();

        let homotopy = CellHomotopy {
            dim: d,
            exps: self
                .support
                .iter()
                .map(|a| a.iter().map(big_to_f64).collect())
                .collect(),
            exps_big: self.support.clone(),
            coeffs: self.coeffs.clone(),
            upow,
        };

        let starts = self.start_solutions(cell)?;
        Ok((homotopy, starts))
    }

    /// Solves the binomial start system supported on the cell: the kernel of
    /// the cell-restricted coefficient matrix pins down the ratios of the
    /// cell monomials, and the resulting binomial system has exactly `nvol`
    /// torus solutions.
    fn start_solutions(&self, cell: &Cell) -> Result<Vec<Vec<Complex64>>, WitnessError> {
        let d = self.dim;
        let mut restricted: Vec<Vec<Complex64>> = self
            .coeffs
            .iter()
            .map(|row| cell.indices.iter().map(|&k| row[k as usize]).collect())
            .collect();
        let kernel = kernel_vector(&mut restricted).ok_or(WitnessError::UnluckyCoefficients)?;
        if kernel.iter().any(|k| k.norm() < 1e-12) {
            return Err(WitnessError::UnluckyCoefficients);
        }

        let base = &self.support[cell.indices[0] as usize];
        let mut exponents = IntMatrix::zeros(d, d);
        let mut rhs = Vec::with_capacity(d);
        for (j, &idx) in cell.indices[1..].iter().enumerate() {
            let a = &self.support[idx as usize];
            for row in 0..d {
                exponents[(row, j)] = &a[row] - &base[row];
            }
            rhs.push(kernel[j + 1] / kernel[0]);
        }

        let system = BinomialSystem::from_parts(exponents, rhs)
            .expect("kernel entries are checked nonzero");
        let structure = system
            .analyze()
            .map_err(|_| WitnessError::UnluckyCoefficients)?;
        debug_assert_eq!(structure.dimension(), 0);
        Ok(structure
            .components()
            .map(|component| component.evaluate(&[]))
            .collect())
    }
}

/// Exact slacks of all support points against the cell's witness functional.
/// Zero exactly on the cell, positive elsewhere.
fn cell_slacks(pts: &LiftedPointSet, cell: &Cell) -> Vec<BigRational> {
    let base = cell.indices[0];
    let mut v = BigRational::from(BigInt::from(pts.lifting(base)));
    for (coord, a) in cell.normal.iter().zip(pts.point(base)) {
        v += coord * BigRational::from(a.clone());
    }
    (0..pts.len() as u32)
        .map(|i| {
            let mut g = BigRational::from(BigInt::from(pts.lifting(i))) - &v;
            for (coord, a) in cell.normal.iter().zip(pts.point(i)) {
                g += coord * BigRational::from(a.clone());
            }
            debug_assert!(!g.is_negative());
            g
        })
        .collect()
}

/// One polyhedral homotopy `H_i(y, u) = sum_k c_{ik} u^{E_k} y^{a_k}` with
/// integer `E_k >= 0` vanishing exactly on the cell's support points.
pub(crate) struct CellHomotopy {
    dim: usize,
    exps: Vec<Vec<f64>>,
    exps_big: Vec<Vec<BigInt>>,
    coeffs: Vec<Vec<Complex64>>,
    upow: Vec<f64>,
}

impl CellHomotopy {
    pub(crate) fn dim(&self) -> usize {
        self.dim
    }

    fn monomials(&self, y: &[Complex64]) -> Vec<Complex64> {
        self.exps_big.iter().map(|a| monomial(y, a)).collect()
    }

    pub(crate) fn eval(&self, y: &[Complex64], u: f64) -> Vec<Complex64> {
        let monomials = self.monomials(y);
        self.coeffs
            .iter()
            .map(|row| {
                let mut acc = Complex64::zero();
                for ((c, m), e) in row.iter().zip(&monomials).zip(&self.upow) {
                    acc += c * m * u_power(u, *e);
                }
                acc
            })
            .collect()
    }

    /// Jacobian in `y`, row-major `dim x dim`.
    pub(crate) fn jacobian(&self, y: &[Complex64], u: f64) -> Vec<Complex64> {
        let d = self.dim;
        let monomials = self.monomials(y);
        let mut jac = vec![Complex64::zero(); d * d];
        for (i, row) in self.coeffs.iter().enumerate() {
            for (((c, m), e), a) in row
                .iter()
                .zip(&monomials)
                .zip(&self.upow)
                .zip(&self.exps)
            {
                let factor = c * m * u_power(u, *e);
                if factor.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..d {
                    if a[j] != 0.0 {
                        jac[i * d + j] += factor * a[j] / y[j];
                    }
                }
            }
        }
        jac
    }

    /// Derivative of `H` in the homotopy parameter.
    pub(crate) fn du(&self, y: &[Complex64], u: f64) -> Vec<Complex64> {
        let monomials = self.monomials(y);
        self.coeffs
            .iter()
            .map(|row| {
                let mut acc = Complex64::zero();
                for ((c, m), e) in row.iter().zip(&monomials).zip(&self.upow) {
                    acc += c * m * u_power_derivative(u, *e);
                }
                acc
            })
            .collect()
    }
}

fn unit_coefficient(rng: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * rng.gen::<f64>())
}

fn monomial(y: &[Complex64], a: &[BigInt]) -> Complex64 {
    let mut acc = Complex64::one();
    for (base, e) in y.iter().zip(a) {
        if !e.is_zero() {
            acc *= complex_pow(*base, e);
        }
    }
    acc
}

/// `u^e` for `u` in `[0, 1]` and a nonnegative exponent that may round to
/// infinity; huge exponents decay to zero smoothly instead of overflowing.
fn u_power(u: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if u == 0.0 {
        0.0
    } else if u == 1.0 {
        1.0
    } else {
        (e * u.ln()).exp()
    }
}

/// Derivative of `u^e` in `u`, guarded the same way. For an exponent that
/// rounded to infinity the term is identically zero below `u = 1`, so its
/// derivative is reported as zero there.
fn u_power_derivative(u: f64, e: f64) -> f64 {
    if e == 0.0 {
        0.0
    } else if e == 1.0 {
        1.0
    } else if u == 0.0 {
        0.0
    } else if u == 1.0 {
        e
    } else if e.is_infinite() {
        0.0
    } else {
        (e.ln() + (e - 1.0) * u.ln()).exp()
    }
}

/// Kernel vector of a `d x (d+1)` complex matrix of full row rank, by
/// Gauss-Jordan elimination with partial pivoting. `None` when the rows are
/// rank deficient.
fn kernel_vector(a: &mut [Vec<Complex64>]) -> Option<Vec<Complex64>> {
    let rows = a.len();
    let cols = rows + 1;
    debug_assert!(a.iter().all(|r| r.len() == cols));
    let mut pivot_col = vec![usize::MAX; rows];
    let mut used = vec![false; cols];
    for r in 0..rows {
        let (col, _) = (0..cols)
            .filter(|&c| !used[c])
            .map(|c| (c, a[r][c].norm()))
            .fold((usize::MAX, 0.0), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            });
        if col == usize::MAX || a[r][col].norm() < 1e-12 {
            return None;
        }
        used[col] = true;
        pivot_col[r] = col;
        let inv = a[r][col].inv();
        for c in 0..cols {
            a[r][c] *= inv;
        }
        for other in 0..rows {
            if other == r || a[other][col].norm_sqr() == 0.0 {
                continue;
            }
            let factor = a[other][col];
            for c in 0..cols {
                let delta = factor * a[r][c];
                a[other][c] -= delta;
            }
        }
    }
    let free = (0..cols).find(|&c| !used[c]).expect("one free column");
    let mut kernel = vec![Complex64::zero(); cols];
    kernel[free] = Complex64::one();
    for r in 0..rows {
        kernel[pivot_col[r]] = -a[r][free];
    }
    Some(kernel)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_vector_annihilates_the_rows() {
        let mut m = vec![
            vec![
                Complex64::new(1.0, 0.5),
                Complex64::new(-2.0, 0.0),
                Complex64::new(0.0, 1.0),
            ],
            vec![
                Complex64::new(0.0, -1.0),
                Complex64::new(1.0, 1.0),
                Complex64::new(3.0, 0.0),
            ],
        ];
        let original = m.clone();
        let kernel = kernel_vector(&mut m).expect("rows are independent");
        for row in &original {
            let acc: Complex64 = row.iter().zip(&kernel).map(|(a, k)| a * k).sum();
            assert!(acc.norm() < 1e-12, "residual {}", acc.norm());
        }
    }

    #[test]
    fn guarded_powers_handle_extremes() {
        assert_eq!(u_power(0.5, 0.0), 1.0);
        assert_eq!(u_power(0.0, 3.0), 0.0);
        assert_eq!(u_power(1.0, f64::INFINITY), 1.0);
        assert_eq!(u_power(0.5, f64::INFINITY), 0.0);
        assert!((u_power(0.5, 3.0) - 0.125).abs() < 1e-15);
        assert_eq!(u_power_derivative(0.5, 1.0), 1.0);
        assert_eq!(u_power_derivative(0.5, f64::INFINITY), 0.0);
        assert!((u_power_derivative(0.5, 3.0) - 0.75).abs() < 1e-15);
        assert_eq!(u_power_derivative(0.0, 5.0), 0.0);
    }
}
