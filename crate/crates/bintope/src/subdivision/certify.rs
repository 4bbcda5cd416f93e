//! Exact certification of candidate cells.
//!
//! Every cell reported by the lower-hull traversal is re-derived here over
//! the rationals before it enters the subdivision: the witness normal comes
//! from solving the cell's own linear system, never from the floating-point
//! tableau, and the slack of every point in the configuration is checked
//! against that witness.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::intlinalg::{det_exact, IntMatrix};
use crate::lpkernel::LiftedPointSet;

/// Outcome of exact certification of one candidate cell.
pub(crate) enum Certificate {
    /// The cell is a full-dimensional lower-hull face with a strictly
    /// generic lifting.
    Valid {
        normal: Vec<BigRational>,
        nvol: BigInt,
    },
    /// The candidate fails exact feasibility; it was a floating-point
    /// artifact and must be discarded.
    Invalid,
    /// The lifting is not generic on this configuration: either a lower
    /// face is not simplicial or extra points land on a cell's hyperplane.
    Degenerate,
}

/// Certifies `cell` against the full configuration.
///
/// The cell must have `dim + 1` sorted indices. The witness functional
/// `(alpha, v)` is recovered from the interpolation conditions
/// `<a_i, alpha> + omega_i = v` and validated on every lifted point.
pub(crate) fn certify_cell(pts: &LiftedPointSet, cell: &[u32]) -> Certificate {
    let d = pts.dim();
    debug_assert_eq!(cell.len(), d + 1);

    let base = pts.point(cell[0]);
    let mut edges = IntMatrix::zeros(d, d);
    for (row, &i) in cell[1..].iter().enumerate() {
        let a = pts.point(i);
        for col in 0..d {
            edges[(row, col)] = &a[col] - &base[col];
        }
    }
    let det = det_exact(&edges).expect("edge matrix is square");
    if det.is_zero() {
        return if exact_face(pts, cell) {
            Certificate::Degenerate
        } else {
            Certificate::Invalid
        };
    }

    let rhs: Vec<BigRational> = cell[1..]
        .iter()
        .map(|&i| BigRational::from(BigInt::from(pts.lifting(cell[0]) - pts.lifting(i))))
        .collect();
    let alpha = solve_unique(&edges, &rhs);

    let mut v = BigRational::from(BigInt::from(pts.lifting(cell[0])));
    for (coord, a) in alpha.iter().zip(base) {
        v += coord * BigRational::from(a.clone());
    }

    for i in 0..pts.len() as u32 {
        let mut g = BigRational::from(BigInt::from(pts.lifting(i))) - &v;
        for (coord, a) in alpha.iter().zip(pts.point(i)) {
            g += coord * BigRational::from(a.clone());
        }
        if g.is_negative() {
            return Certificate::Invalid;
        }
        if g.is_zero() && cell.binary_search(&i).is_err() {
            return Certificate::Degenerate;
        }
    }

    Certificate::Valid {
        normal: alpha,
        nvol: det.abs(),
    }
}

/// Exact lower-hull feasibility for a set that is affinely degenerate, used
/// to tell a flat face (lifting problem) from a floating-point artifact.
fn exact_face(pts: &LiftedPointSet, node: &[u32]) -> bool {
    use crate::lpkernel::{node_feasible_exact, LpCounters};
    let mut counters = LpCounters::default();
    node_feasible_exact(pts, node, &mut counters)
}

/// Solves `m x = rhs` for an invertible integer matrix by fraction-free
/// elimination over the rationals.
fn solve_unique(m: &IntMatrix, rhs: &[BigRational]) -> Vec<BigRational> {
    let n = m.rows();
    debug_assert_eq!(m.cols(), n);
    debug_assert_eq!(rhs.len(), n);
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| BigRational::from(m[(i, j)].clone()))
                .chain(std::iter::once(rhs[i].clone()))
                .collect()
        })
        .collect();

    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .expect("matrix is invertible");
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for row in 0..n {
            if row == col || a[row][col].is_zero() {
                continue;
            }
            let factor = a[row][col].clone();
            for j in col..=n {
                let delta = &factor * &a[col][j];
                a[row][j] -= delta;
            }
        }
    }
    a.into_iter().map(|row| row[n].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn big(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn solves_a_small_invertible_system() {
        let m = big(&[&[2, 1], &[1, 3]]);
        let rhs = vec![
            BigRational::from(BigInt::from(5)),
            BigRational::from(BigInt::from(10)),
        ];
        let x = solve_unique(&m, &rhs);
        assert_eq!(x[0], BigRational::one());
        assert_eq!(x[1], BigRational::from(BigInt::from(3)));
    }

    #[test]
    fn certifies_the_lower_square_triangle() {
        let points = vec![
            vec![BigInt::from(0), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(1)],
            vec![BigInt::from(1), BigInt::from(0)],
            vec![BigInt::from(1), BigInt::from(1)],
        ];
        let pts = LiftedPointSet::with_lifting(points, vec![1, 0, 0, 1]);
        match certify_cell(&pts, &[0, 1, 2]) {
            Certificate::Valid { nvol, .. } => assert_eq!(nvol, BigInt::one()),
            _ => panic!("lower triangle must certify"),
        }
        match certify_cell(&pts, &[0, 1, 3]) {
            Certificate::Invalid => {}
            _ => panic!("upper-left triangle is not in the lower hull"),
        }
    }

    #[test]
    fn flags_a_point_on_the_cell_hyperplane() {
        let points = vec![
            vec![BigInt::from(0)],
            vec![BigInt::from(1)],
            vec![BigInt::from(2)],
        ];
        let pts = LiftedPointSet::with_lifting(points, vec![0, 0, 0]);
        match certify_cell(&pts, &[0, 2]) {
            Certificate::Degenerate => {}
            _ => panic!("midpoint lies on the span of {{0, 2}}"),
        }
    }
}
