//! Dense tableau simplex specialized to lower-hull membership problems.
//!
//! Every LP solved here has one row per lifted point `a`, stating
//! `-<a, alpha> + v + g_a = omega_a` with slack `g_a >= 0`, free variables
//! split into nonnegative pairs. Since liftings are nonnegative the slack
//! columns form a feasible starting basis, so no artificial variables are
//! ever needed. Columns can be marked restricted, which pins the matching
//! slack to zero: the column may not enter the basis, and rows whose basic
//! variable is restricted block the ratio test at step zero.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Arithmetic interface shared by the fast floating-point path and the exact
/// rational fallback. Tolerances are part of the scalar: the float instance
/// compares against small epsilons, the rational instance against zero.
pub(crate) trait Scalar: Clone + std::fmt::Debug {
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_bigint(v: &BigInt) -> Self;

    fn is_zero(&self) -> bool;
    /// Strictly below the negative improvement threshold.
    fn improving(&self) -> bool;
    /// Strictly above the pivot threshold.
    fn admissible_pivot(&self) -> bool;
    fn lt(&self, other: &Self) -> bool;

    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn neg_val(&self) -> Self;
}

const FEAS_TOL: f64 = 1e-9;

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_bigint(v: &BigInt) -> Self {
        crate::numeric::big_to_f64(v)
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn improving(&self) -> bool {
        *self < -FEAS_TOL
    }
    fn admissible_pivot(&self) -> bool {
        *self > FEAS_TOL
    }
    fn lt(&self, other: &Self) -> bool {
        self < other
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg_val(&self) -> Self {
        -self
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_bigint(v: &BigInt) -> Self {
        BigRational::from(v.clone())
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn improving(&self) -> bool {
        self.is_negative()
    }
    fn admissible_pivot(&self) -> bool {
        self.is_positive()
    }
    fn lt(&self, other: &Self) -> bool {
        self < other
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg_val(&self) -> Self {
        -self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum LpStatus {
    Optimal,
    Unbounded,
    /// The floating-point path exceeded its pivot budget; callers retry
    /// exactly. Exact solves terminate by Bland's rule and never stall.
    Stalled,
}

/// Pivot budget for one floating-point solve. The problems here have a few
/// dozen rows; a healthy solve takes well under a hundred pivots.
const STALL_LIMIT: u64 = 20_000;

/// Row-reduced tableau. Column layout: `d` positive and `d` negative parts of
/// the hull normal, positive and negative part of the hull offset, then one
/// slack per point. The last column of each row is the right-hand side; the
/// cost row keeps the negated objective value in that slot.
#[derive(Clone)]
pub(crate) struct Tableau<S: Scalar> {
    rows: usize,
    cols: usize,
    dim: usize,
    a: Vec<S>,
    cost: Vec<S>,
    basis: Vec<usize>,
    row_of_col: Vec<i32>,
    restricted: Vec<bool>,
}

impl<S: Scalar> Tableau<S> {
    /// Initial tableau for the lifted point set, slack basis, all-zero
    /// normal. The right-hand side carries the lifting values, possibly
    /// rescaled by the caller; they must be nonnegative.
    pub fn new(points: &[Vec<BigInt>], rhs: &[S]) -> Tableau<S> {
        let rows = points.len();
        let dim = if rows == 0 { 0 } else { points[0].len() };
        let cols = 2 * dim + 2 + rows;
        let width = cols + 1;
        let mut a = vec![S::zero(); rows * width];
        for (i, p) in points.iter().enumerate() {
            let row = &mut a[i * width..(i + 1) * width];
            for (k, coord) in p.iter().enumerate() {
                let c = S::from_bigint(coord);
                row[k] = c.neg_val();
                row[dim + k] = c;
            }
            row[2 * dim] = S::one();
            row[2 * dim + 1] = S::one().neg_val();
            row[2 * dim + 2 + i] = S::one();
            row[cols] = rhs[i].clone();
        }
        Tableau {
            rows,
            cols,
            dim,
            a,
            cost: vec![S::zero(); width],
            basis: (0..rows).map(|i| 2 * dim + 2 + i).collect(),
            row_of_col: {
                let mut r = vec![-1i32; cols];
                for (i, item) in r.iter_mut().enumerate().skip(2 * dim + 2) {
                    *item = (i - 2 * dim - 2) as i32;
                }
                r
            },
            restricted: vec![false; cols],
        }
    }

    pub fn slack_col(&self, point: usize) -> usize {
        2 * self.dim + 2 + point
    }

    fn width(&self) -> usize {
        self.cols + 1
    }

    fn row(&self, i: usize) -> &[S] {
        &self.a[i * self.width()..(i + 1) * self.width()]
    }

    /// Marks a column as pinned to zero from now on.
    pub fn restrict(&mut self, col: usize) {
        self.restricted[col] = true;
    }

    /// Replaces the objective by `sign * x_col` and reduces it against the
    /// current basis.
    pub fn set_cost_single(&mut self, col: usize, sign_negative: bool) {
        let width = self.width();
        for entry in self.cost.iter_mut() {
            *entry = S::zero();
        }
        self.cost[col] = if sign_negative {
            S::one().neg_val()
        } else {
            S::one()
        };
        let r = self.row_of_col[col];
        if r >= 0 {
            let coef = self.cost[col].clone();
            let row = r as usize;
            for j in 0..width {
                let delta = coef.mul(&self.a[row * width + j]);
                self.cost[j] = self.cost[j].sub(&delta);
            }
        }
    }

    /// Replaces the objective by the sum of the given columns and reduces it.
    pub fn set_cost_sum(&mut self, cols: &[usize]) {
        let width = self.width();
        for entry in self.cost.iter_mut() {
            *entry = S::zero();
        }
        for &c in cols {
            self.cost[c] = self.cost[c].add(&S::one());
        }
        for &c in cols {
            let r = self.row_of_col[c];
            if r >= 0 {
                let row = r as usize;
                for j in 0..width {
                    let delta = self.a[row * width + j].clone();
                    self.cost[j] = self.cost[j].sub(&delta);
                }
            }
        }
    }

    /// Current objective value.
    pub fn objective(&self) -> S {
        self.cost[self.cols].neg_val()
    }

    /// Value of a column in the current basic solution.
    pub fn value(&self, col: usize) -> S {
        match self.row_of_col[col] {
            r if r >= 0 => self.row(r as usize)[self.cols].clone(),
            _ => S::zero(),
        }
    }

    /// The hull normal of the current basic solution.
    pub fn alpha(&self) -> Vec<S> {
        (0..self.dim)
            .map(|k| self.value(k).sub(&self.value(self.dim + k)))
            .collect()
    }

    /// The hull offset of the current basic solution.
    pub fn offset(&self) -> S {
        self.value(2 * self.dim).sub(&self.value(2 * self.dim + 1))
    }

    fn pivot(&mut self, prow: usize, pcol: usize) {
        let width = self.width();
        let inv = S::one().div(&self.a[prow * width + pcol]);
        for j in 0..width {
            let cur = self.a[prow * width + j].clone();
            if !cur.is_zero() {
                self.a[prow * width + j] = cur.mul(&inv);
            }
        }
        let pivot_row: Vec<S> = self.row(prow).to_vec();
        for i in 0..self.rows {
            if i == prow {
                continue;
            }
            let factor = self.a[i * width + pcol].clone();
            if factor.is_zero() {
                continue;
            }
            let row = &mut self.a[i * width..(i + 1) * width];
            for (j, pv) in pivot_row.iter().enumerate() {
                if !pv.is_zero() {
                    row[j] = row[j].sub(&factor.mul(pv));
                }
            }
        }
        let factor = self.cost[pcol].clone();
        if !factor.is_zero() {
            for (j, pv) in pivot_row.iter().enumerate() {
                if !pv.is_zero() {
                    self.cost[j] = self.cost[j].sub(&factor.mul(pv));
                }
            }
        }
        self.row_of_col[self.basis[prow]] = -1;
        self.basis[prow] = pcol;
        self.row_of_col[pcol] = prow as i32;
    }

    /// Runs the simplex method with Bland's rule until the current objective
    /// is minimal or shown unbounded below. Bland's rule is load-bearing for
    /// the floating-point instance too: these problems are heavily degenerate
    /// and aggressive pricing cycles through long zero-step pivot chains
    /// whose roundoff can corrupt the verdict.
    pub fn optimize(&mut self) -> LpStatus {
        let width = self.width();
        let mut steps = 0u64;
        loop {
            if !S::EXACT {
                steps += 1;
                if steps > STALL_LIMIT {
                    return LpStatus::Stalled;
                }
            }
            let mut entering = usize::MAX;
            for c in 0..self.cols {
                if self.row_of_col[c] < 0 && !self.restricted[c] && self.cost[c].improving() {
                    entering = c;
                    break;
                }
            }
            if entering == usize::MAX {
                return LpStatus::Optimal;
            }

            let mut leave_row = usize::MAX;
            let mut best_ratio = S::zero();
            let mut have = false;
            for i in 0..self.rows {
                let coef = &self.a[i * width + entering];
                let pinned_basic = self.restricted[self.basis[i]];
                let blocking = if pinned_basic {
                    coef.admissible_pivot() || coef.neg_val().admissible_pivot()
                } else {
                    coef.admissible_pivot()
                };
                if !blocking {
                    continue;
                }
                let ratio = if pinned_basic {
                    S::zero()
                } else {
                    self.a[i * width + self.cols].div(coef)
                };
                let better = !have
                    || ratio.lt(&best_ratio)
                    || (!best_ratio.lt(&ratio) && self.basis[i] < self.basis[leave_row]);
                if better {
                    leave_row = i;
                    best_ratio = ratio;
                    have = true;
                }
            }
            if !have {
                return LpStatus::Unbounded;
            }
            self.pivot(leave_row, entering);
        }
    }
}
