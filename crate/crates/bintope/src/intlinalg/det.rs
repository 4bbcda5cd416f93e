//! Exact determinants via the Bareiss fraction-free elimination.

use super::{IntMatrix, LinalgError};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Determinant of a square integer matrix, computed exactly. Every division
/// in the Bareiss recurrence is exact, so intermediate values stay integral
/// and bounded by minors of the input.
pub fn det_exact(a: &IntMatrix) -> Result<BigInt, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut w = a.clone();
    let mut sign = 1i8;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if w[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !w[(i, k)].is_zero()) {
                Some(i) => {
                    w.swap_rows(k, i);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &w[(i, j)] * &w[(k, k)] - &w[(i, k)] * &w[(k, j)];
                w[(i, j)] = num / &prev;
            }
            w[(i, k)] = BigInt::zero();
        }
        prev = w[(k, k)].clone();
    }
    let det = w[(n - 1, n - 1)].clone();
    Ok(if sign < 0 { -det } else { det })
}

/// True when the matrix is square with determinant `+1` or `-1`.
pub fn is_unimodular(a: &IntMatrix) -> Result<bool, LinalgError> {
    Ok(det_exact(a)?.abs().is_one())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_determinants() {
        assert_eq!(det_exact(&IntMatrix::identity(4)).unwrap(), BigInt::one());
        let a = IntMatrix::from_rows(&[vec![2, 1], vec![7, 4]]);
        assert_eq!(det_exact(&a).unwrap(), BigInt::one());
        let b = IntMatrix::from_rows(&[vec![0, 2], vec![3, 0]]);
        assert_eq!(det_exact(&b).unwrap(), BigInt::from(-6));
        let singular = IntMatrix::from_rows(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(det_exact(&singular).unwrap(), BigInt::zero());
    }

    #[test]
    fn zero_pivot_with_later_rows() {
        let a = IntMatrix::from_rows(&[vec![0, 1, 2], vec![1, 0, 3], vec![4, 5, 0]]);
        // Expansion along the first row: -1*(0-12) + 2*(5-0) = 22.
        assert_eq!(det_exact(&a).unwrap(), BigInt::from(22));
    }

    #[test]
    fn rejects_non_square() {
        assert!(det_exact(&IntMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn unimodular_check() {
        assert!(is_unimodular(&IntMatrix::identity(3)).unwrap());
        let shear = IntMatrix::from_rows(&[vec![1, 5], vec![0, -1]]);
        assert!(is_unimodular(&shear).unwrap());
        let not = IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]]);
        assert!(!is_unimodular(&not).unwrap());
    }
}
