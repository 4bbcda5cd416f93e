//! Critical-point systems of the cyclic superpotentials attached to abelian
//! orbifold quiver theories.
//!
//! For parameters `(m, k)` the superpotential is a sum over the torus
//! `Z_m x Z_k` of two trilinear terms in variables `x`, `y`, `z` indexed by
//! the torus, with periodic boundary conditions. Every variable occurs in
//! exactly two terms with opposite signs, so each partial derivative is a
//! binomial and the critical points over the algebraic torus form a
//! binomial system: one equation per variable, right-hand side exactly one.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use std::time::{Duration, Instant};
use thiserror::Error;

use crate::binomial::BinomialSystem;
use crate::intlinalg::IntMatrix;
use crate::subdivision::{degree, SubdivideOptions};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MspaceError {
    /// For `m = k = 1` both terms of the superpotential coincide, every
    /// partial derivative vanishes identically, and there is no system.
    #[error("the (1, 1) superpotential has identically vanishing derivatives")]
    DegenerateParameters,
}

/// Builds the critical-point binomial system for parameters `(m, k)`.
///
/// Variables are ordered `x_{0,0}, .., x_{m-1,k-1}, y_{..}, z_{..}` with the
/// second index fastest; equations follow the same order, one per variable
/// the derivative is taken in. Right-hand sides are exact ones.
pub fn generate(m: usize, k: usize) -> Result<BinomialSystem, MspaceError> {
    assert!(m >= 1 && k >= 1, "parameters must be positive");
    if m == 1 && k == 1 {
        return Err(MspaceError::DegenerateParameters);
    }
    let block = m * k;
    let n = 3 * block;
    let x = |i: usize, j: usize| (i % m) * k + (j % k);
    let y = |i: usize, j: usize| block + x(i, j);
    let z = |i: usize, j: usize| 2 * block + x(i, j);

    let mut exponents = IntMatrix::zeros(n, n);
    let mut col = 0usize;
    let mut push = |exponents: &mut IntMatrix, plus: [usize; 2], minus: [usize; 2]| {
        for v in plus {
            exponents[(v, col)] += 1;
        }
        for v in minus {
            exponents[(v, col)] -= 1;
        }
        col += 1;
    };

    for i in 0..m {
        for j in 0..k {
            push(
                &mut exponents,
                [y(i + 1, j), z(i + 1, j + 1)],
                [y(i, j + k - 1), z(i + 1, j)],
            );
        }
    }
    for i in 0..m {
        for j in 0..k {
            push(
                &mut exponents,
                [x(i + m - 1, j), z(i, j + 1)],
                [x(i, j + 1), z(i + 1, j + 1)],
            );
        }
    }
    for i in 0..m {
        for j in 0..k {
            push(
                &mut exponents,
                [x(i + m - 1, j + k - 1), y(i, j + k - 1)],
                [y(i + m - 1, j + k - 1), x(i + m - 1, j)],
            );
        }
    }
    debug_assert_eq!(col, n);

    let rhs = vec![BigRational::one(); n];
    Ok(BinomialSystem::from_exact_parts(exponents, rhs).expect("generated system is well formed"))
}

/// One row of a parameter sweep.
#[derive(Clone, Debug)]
pub struct BenchRow {
    pub m: usize,
    pub k: usize,
    pub dimension: usize,
    pub components: BigInt,
    pub degree: BigInt,
    /// Set when the traversal hit the budget; the degree is then only a
    /// lower bound.
    pub is_lower_bound: bool,
    pub time_s: f64,
    pub lps: u64,
}

impl BenchRow {
    pub const CSV_HEADER: &'static str = "m,k,dim,components,degree,is_lower_bound,time_s,lps";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.3},{}",
            self.m,
            self.k,
            self.dimension,
            self.components,
            self.degree,
            self.is_lower_bound,
            self.time_s,
            self.lps
        )
    }
}

/// Sweeps all parameter pairs `m <= k <= max` (skipping the degenerate
/// `(1, 1)`) and computes dimension, component count, and degree for each,
/// stopping when the shared time budget runs out. Pairs cut short by the
/// budget report lower bounds.
pub fn benchmark(max: usize, budget: Duration, threads: usize, seed: u64) -> Vec<BenchRow> {
    let deadline = Instant::now() + budget;
    let mut rows = Vec::new();
    for m in 1..=max {
        for k in m..=max {
            if m == 1 && k == 1 {
                continue;
            }
            if Instant::now() >= deadline {
                return rows;
            }
            let started = Instant::now();
            let system = generate(m, k).expect("nondegenerate parameters");
            let Ok(structure) = system.analyze() else {
                continue;
            };
            let opts = SubdivideOptions {
                workers: threads,
                pivoting: true,
                seed,
                deadline: Some(deadline),
            };
            let Ok(report) = degree(&structure, &opts) else {
                continue;
            };
            let lps = report
                .subdivision
                .as_ref()
                .map_or(0, |s| s.stats.float_lps + s.stats.exact_lps);
            rows.push(BenchRow {
                m,
                k,
                dimension: structure.dimension(),
                components: structure.component_count().clone(),
                degree: report.degree,
                is_lower_bound: report.truncated,
                time_s: started.elapsed().as_secs_f64(),
                lps,
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_parameters_are_rejected() {
        assert!(matches!(
            generate(1, 1),
            Err(MspaceError::DegenerateParameters)
        ));
    }

    #[test]
    fn columns_balance_to_degree_zero() {
        let system = generate(2, 3).expect("valid parameters");
        let a = system.exponents();
        for j in 0..a.cols() {
            let total: BigInt = (0..a.rows()).map(|i| a[(i, j)].clone()).sum();
            assert_eq!(total, BigInt::from(0), "column {j}");
        }
    }

    #[test]
    fn dimensions_follow_the_closed_form() {
        for m in 1..=4usize {
            for k in 1..=4usize {
                if m == 1 && k == 1 {
                    continue;
                }
                let system = generate(m, k).expect("valid parameters");
                let structure = system.analyze().expect("consistent system");
                assert_eq!(
                    structure.dimension(),
                    m * k + 2,
                    "dimension of the ({m}, {k}) solution set"
                );
            }
        }
    }

    #[test]
    fn first_nontrivial_degree_is_two() {
        let system = generate(1, 2).expect("valid parameters");
        let structure = system.analyze().expect("consistent system");
        let report = degree(&structure, &SubdivideOptions::default()).expect("degree");
        assert_eq!(report.degree, BigInt::from(2));
    }
}
