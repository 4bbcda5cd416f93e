//! Laurent binomial systems and the structure of their solution sets.
//!
//! A system `x^A = b` over the algebraic torus, where the columns of the
//! integer matrix `A` hold the exponents of one equation each, either has no
//! torus solutions at all or splits into finitely many components of a common
//! dimension. [`BinomialSystem::analyze`] computes that structure through a
//! Smith normal form of `A`; every component is the image of a monomial map
//! of a lower-dimensional torus and can be evaluated at arbitrary parameter
//! values.

mod json;

use crate::intlinalg::{smith_normal_form, IntMatrix};
use crate::intlinalg::SnfResult;
use crate::numeric;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

/// Per-coordinate tolerance on the compatibility products `b^{Q_0}` when the
/// right-hand side is known only in floating point.
const CONSISTENCY_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum BinomialError {
    #[error("system is inconsistent: a compatibility product deviates from 1 by {deviation:.3e}")]
    Inconsistent { deviation: f64 },
    #[error("equation {index}: expected {expected} exponents, found {found}")]
    ExponentArity {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("equation {index}: right-hand side must be a nonzero torus value")]
    ZeroRhs { index: usize },
    #[error("equation {index}: leading coefficient is zero")]
    ZeroCoefficient { index: usize },
    #[error("invalid system description: {0}")]
    Parse(String),
}

/// A system of Laurent binomial equations `x^{a_j} = b_j` in `num_vars`
/// torus variables, one equation per column of `exponents`.
#[derive(Clone, Debug)]
pub struct BinomialSystem {
    num_vars: usize,
    exponents: IntMatrix,
    rhs: Vec<Complex64>,
    exact_rhs: Option<Vec<BigRational>>,
}

impl BinomialSystem {
    /// Builds a system from the exponent matrix (one column per equation)
    /// and the complex right-hand side values.
    pub fn from_parts(exponents: IntMatrix, rhs: Vec<Complex64>) -> Result<Self, BinomialError> {
        if rhs.len() != exponents.cols() {
            return Err(BinomialError::Parse(format!(
                "{} equations but {} right-hand side values",
                exponents.cols(),
                rhs.len()
            )));
        }
        for (index, b) in rhs.iter().enumerate() {
            if b.norm() == 0.0 {
                return Err(BinomialError::ZeroRhs { index });
            }
        }
        Ok(BinomialSystem {
            num_vars: exponents.rows(),
            exponents,
            rhs,
            exact_rhs: None,
        })
    }

    /// Like [`from_parts`](Self::from_parts) but with exact rational
    /// right-hand sides, enabling exact consistency decisions.
    pub fn from_exact_parts(
        exponents: IntMatrix,
        rhs: Vec<BigRational>,
    ) -> Result<Self, BinomialError> {
        if rhs.len() != exponents.cols() {
            return Err(BinomialError::Parse(format!(
                "{} equations but {} right-hand side values",
                exponents.cols(),
                rhs.len()
            )));
        }
        for (index, b) in rhs.iter().enumerate() {
            if b.is_zero() {
                return Err(BinomialError::ZeroRhs { index });
            }
        }
        let float: Vec<Complex64> = rhs
            .iter()
            .map(|b| Complex64::new(numeric::rational_to_f64(b), 0.0))
            .collect();
        Ok(BinomialSystem {
            num_vars: exponents.rows(),
            exponents,
            rhs: float,
            exact_rhs: Some(rhs),
        })
    }

    /// Parses the JSON description accepted by the command line tools.
    pub fn from_json(text: &str) -> Result<Self, BinomialError> {
        json::parse(text)
    }

    /// Serializes the system back to the JSON input format.
    pub fn to_json(&self) -> Result<String, BinomialError> {
        json::render(self)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_equations(&self) -> usize {
        self.exponents.cols()
    }

    pub fn exponents(&self) -> &IntMatrix {
        &self.exponents
    }

    pub fn rhs(&self) -> &[Complex64] {
        &self.rhs
    }

    pub fn exact_rhs(&self) -> Option<&[BigRational]> {
        self.exact_rhs.as_deref()
    }

    /// Largest residual `|x^{a_j} - b_j|` over all equations.
    pub fn residual(&self, x: &[Complex64]) -> f64 {
        assert_eq!(x.len(), self.num_vars, "point has wrong dimension");
        let mut worst = 0.0f64;
        for j in 0..self.num_equations() {
            let mut value = Complex64::one();
            for (i, xi) in x.iter().enumerate() {
                value *= numeric::complex_pow(*xi, &self.exponents[(i, j)]);
            }
            worst = worst.max((value - self.rhs[j]).norm());
        }
        worst
    }

    /// Decides consistency and computes the component structure of the
    /// solution set. Consistency is checked exactly when the right-hand side
    /// is rational, otherwise each compatibility product must come within
    /// `1e-8` of `1`.
    pub fn analyze(&self) -> Result<SolutionStructure, BinomialError> {
        let snf = smith_normal_form(&self.exponents);
        let r = snf.rank();
        let m = self.num_equations();

        let mut zeta = Vec::with_capacity(r);
        let mut worst = 0.0f64;
        match &self.exact_rhs {
            Some(exact) => {
                for j in 0..m {
                    let mut w = BigRational::one();
                    for (i, b) in exact.iter().enumerate() {
                        let e = &snf.q[(i, j)];
                        if !b.is_one() && !e.is_zero() {
                            w *= numeric::rational_pow(b, e);
                        }
                    }
                    if j < r {
                        let angle = if w.is_negative() { PI } else { 0.0 };
                        zeta.push(root_from_logs(
                            numeric::rational_ln_abs(&w),
                            angle,
                            &snf.divisors[j],
                        ));
                    } else if !w.is_one() {
                        let dev = (numeric::rational_to_f64(&w) - 1.0).abs();
                        worst = worst.max(dev.max(f64::EPSILON));
                    }
                }
                if worst > 0.0 {
                    return Err(BinomialError::Inconsistent { deviation: worst });
                }
            }
            None => {
                let ln_mag: Vec<f64> = self.rhs.iter().map(|b| b.norm().ln()).collect();
                let arg: Vec<f64> = self.rhs.iter().map(|b| b.arg()).collect();
                for j in 0..m {
                    let mut l = 0.0f64;
                    let mut theta = 0.0f64;
                    for i in 0..self.rhs.len() {
                        let e = numeric::big_to_f64(&snf.q[(i, j)]);
                        if e != 0.0 {
                            l += e * ln_mag[i];
                            theta += e * arg[i];
                        }
                    }
                    if j < r {
                        zeta.push(root_from_logs(l, theta, &snf.divisors[j]));
                    } else {
                        let w = Complex64::from_polar(l.exp(), theta);
                        let mut dev = (w - Complex64::one()).norm();
                        if dev.is_nan() {
                            dev = f64::INFINITY;
                        }
                        if dev > CONSISTENCY_TOL {
                            worst = worst.max(dev);
                        }
                    }
                }
                if worst > 0.0 {
                    return Err(BinomialError::Inconsistent { deviation: worst });
                }
            }
        }

        let component_count = snf.divisors.iter().product();
        let p = Arc::new(snf.p.clone());
        Ok(SolutionStructure {
            snf,
            p,
            num_vars: self.num_vars,
            zeta,
            component_count,
        })
    }
}

/// Principal `d`-th root computed from the log-polar form of the radicand,
/// so the radicand itself never has to fit in a double.
fn root_from_logs(ln_mag: f64, angle: f64, d: &BigInt) -> Complex64 {
    let mut theta = angle.rem_euclid(2.0 * PI);
    if theta > PI {
        theta -= 2.0 * PI;
    }
    let df = numeric::big_to_f64(d);
    Complex64::from_polar((ln_mag / df).exp(), theta / df)
}

/// `e^{2 pi i k / d}` for arbitrary-precision `k` and `d`.
fn unity(k: &BigInt, d: &BigInt) -> Complex64 {
    match (k.to_u64(), d.to_u64()) {
        (Some(k), Some(d)) => numeric::root_of_unity(k, d),
        _ => {
            let frac = numeric::rational_to_f64(&BigRational::new(k.clone(), d.clone()));
            Complex64::from_polar(1.0, 2.0 * PI * frac)
        }
    }
}

/// The component structure of a consistent system's solution set.
#[derive(Clone, Debug)]
pub struct SolutionStructure {
    snf: SnfResult,
    p: Arc<IntMatrix>,
    num_vars: usize,
    zeta: Vec<Complex64>,
    component_count: BigInt,
}

impl SolutionStructure {
    /// Common dimension of every component.
    pub fn dimension(&self) -> usize {
        self.num_vars - self.snf.rank()
    }

    /// Number of components, the absolute product of the diagonal entries of
    /// the Smith normal form.
    pub fn component_count(&self) -> &BigInt {
        &self.component_count
    }

    pub fn snf(&self) -> &SnfResult {
        &self.snf
    }

    /// Support of a generic hyperplane cut of the solution set, written in
    /// the free parameters: the exponent vectors of the parameters in each
    /// original variable, plus the origin for the constant term. Duplicate
    /// columns are merged, keeping first occurrences.
    pub fn cut_support(&self) -> Vec<Vec<BigInt>> {
        let free = self.snf.p_0();
        let d = free.rows();
        let mut support: Vec<Vec<BigInt>> = Vec::with_capacity(free.cols() + 1);
        for j in 0..free.cols() {
            let col = free.col(j);
            if !support.contains(&col) {
                support.push(col);
            }
        }
        let origin = vec![BigInt::zero(); d];
        if !support.contains(&origin) {
            support.push(origin);
        }
        support
    }

    /// The component selected by one residue `k_j` modulo each diagonal
    /// entry `d_j`. Panics when an index is out of range.
    pub fn component(&self, indices: &[BigInt]) -> ComponentParametrization {
        let r = self.snf.rank();
        assert_eq!(indices.len(), r, "one index per torsion coordinate");
        let mut torsion = Vec::with_capacity(r);
        for (j, k) in indices.iter().enumerate() {
            let d = &self.snf.divisors[j];
            assert!(
                !k.is_negative() && k < d,
                "component index {k} out of range for divisor {d}"
            );
            torsion.push(unity(k, d) * self.zeta[j]);
        }
        ComponentParametrization {
            indices: indices.to_vec(),
            torsion,
            p: Arc::clone(&self.p),
        }
    }

    /// Iterates over all components in lexicographic index order.
    pub fn components(&self) -> ComponentIter<'_> {
        ComponentIter {
            structure: self,
            next_indices: Some(vec![BigInt::zero(); self.snf.rank()]),
        }
    }
}

pub struct ComponentIter<'a> {
    structure: &'a SolutionStructure,
    next_indices: Option<Vec<BigInt>>,
}

impl Iterator for ComponentIter<'_> {
    type Item = ComponentParametrization;

    fn next(&mut self) -> Option<ComponentParametrization> {
        let cur = self.next_indices.take()?;
        let item = self.structure.component(&cur);
        let mut nxt = cur;
        for pos in (0..nxt.len()).rev() {
            nxt[pos] += 1;
            if nxt[pos] < self.structure.snf.divisors[pos] {
                self.next_indices = Some(nxt);
                break;
            }
            nxt[pos].set_zero();
        }
        Some(item)
    }
}

/// A monomial parametrization `t -> (xi, t)^P` of one solution component.
/// The torsion coordinates `xi` are fixed roots selected by the component
/// indices; the free coordinates `t` range over a torus of the component's
/// dimension.
#[derive(Clone, Debug)]
pub struct ComponentParametrization {
    indices: Vec<BigInt>,
    torsion: Vec<Complex64>,
    p: Arc<IntMatrix>,
}

impl ComponentParametrization {
    pub fn indices(&self) -> &[BigInt] {
        &self.indices
    }

    pub fn torsion(&self) -> &[Complex64] {
        &self.torsion
    }

    pub fn dimension(&self) -> usize {
        self.p.rows() - self.torsion.len()
    }

    /// Evaluates the parametrization at the free coordinates `t`.
    pub fn evaluate(&self, t: &[Complex64]) -> Vec<Complex64> {
        let n = self.p.rows();
        assert_eq!(t.len(), n - self.torsion.len(), "wrong parameter count");
        let z: Vec<Complex64> = self
            .torsion
            .iter()
            .copied()
            .chain(t.iter().copied())
            .collect();
        (0..n)
            .map(|j| {
                let mut acc = Complex64::one();
                for (i, zi) in z.iter().enumerate() {
                    acc *= numeric::complex_pow(*zi, &self.p[(i, j)]);
                }
                acc
            })
            .collect()
    }
}
