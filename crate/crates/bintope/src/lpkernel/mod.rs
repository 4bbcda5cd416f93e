//! Feasibility kernel for lower-hull traversal.
//!
//! A point set gets a nonnegative integer lifting; a subset is "feasible"
//! when some linear functional touches the lifted set exactly on that subset
//! from below, in other words when the subset lies in a common face of the
//! lower hull. All traversal decisions reduce to three operations: testing a
//! node, testing a one-point extension of a node warm-started from the
//! node's tableau, and walking across a facet of a full-dimensional cell to
//! the adjacent cell. Each operation runs in floating point first and falls
//! back to exact rational arithmetic when the floating-point optimum is too
//! close to call.

mod simplex;

use crate::numeric::big_to_f64;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
pub(crate) use simplex::Scalar;
use simplex::{LpStatus, Tableau};

/// Floating-point optima below this are accepted as zero.
const ZERO_TOL: f64 = 1e-7;
/// Floating-point optima above this are accepted as positive; the band in
/// between goes to the exact solver.
const POSITIVE_TOL: f64 = 1e-5;
/// Relative tolerance when reading a tight set off a floating-point normal.
const TIGHT_TOL: f64 = 1e-9;
/// Lifting values are sampled uniformly from `[0, 2^LIFTING_BITS)`.
const LIFTING_BITS: u32 = 20;

/// A deduplicated point configuration together with its lifting values.
#[derive(Clone, Debug)]
pub struct LiftedPointSet {
    points: Vec<Vec<BigInt>>,
    floats: Vec<Vec<f64>>,
    lifting: Vec<i64>,
    /// Lifting divided by its maximum, used by the floating-point solver so
    /// decision thresholds act relative to the lifting magnitude.
    lifting_scaled: Vec<f64>,
    scale: f64,
    seed: Option<u64>,
    dim: usize,
}

impl LiftedPointSet {
    /// Deduplicates the points (keeping first occurrences in order) and
    /// samples a fresh lifting from the seed.
    pub fn new(points: Vec<Vec<BigInt>>, seed: u64) -> Self {
        let points = dedup_points(points);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lifting = (0..points.len())
            .map(|_| rng.gen_range(0..(1i64 << LIFTING_BITS)))
            .collect();
        Self::assemble(points, lifting, Some(seed))
    }

    /// Uses the given lifting verbatim; the points must already be distinct.
    pub fn with_lifting(points: Vec<Vec<BigInt>>, lifting: Vec<i64>) -> Self {
        let deduped = dedup_points(points);
        assert_eq!(
            deduped.len(),
            lifting.len(),
            "one lifting value per distinct point"
        );
        assert!(lifting.iter().all(|&w| w >= 0), "liftings must be nonnegative");
        Self::assemble(deduped, lifting, None)
    }

    fn assemble(points: Vec<Vec<BigInt>>, lifting: Vec<i64>, seed: Option<u64>) -> Self {
        assert!(!points.is_empty(), "empty point set");
        let dim = points[0].len();
        assert!(
            points.iter().all(|p| p.len() == dim),
            "points of mixed dimension"
        );
        let floats = points
            .iter()
            .map(|p| p.iter().map(big_to_f64).collect())
            .collect();
        let scale = lifting.iter().copied().max().unwrap_or(0).max(1) as f64;
        let lifting_scaled = lifting.iter().map(|&w| w as f64 / scale).collect();
        LiftedPointSet {
            points,
            floats,
            lifting,
            lifting_scaled,
            scale,
            seed,
            dim,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: u32) -> &[BigInt] {
        &self.points[i as usize]
    }

    pub fn points(&self) -> &[Vec<BigInt>] {
        &self.points
    }

    pub fn lifting(&self, i: u32) -> i64 {
        self.lifting[i as usize]
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    fn float_tableau(&self) -> Tableau<f64> {
        Tableau::new(&self.points, &self.lifting_scaled)
    }

    fn exact_tableau(&self) -> Tableau<BigRational> {
        let rhs: Vec<BigRational> = self
            .lifting
            .iter()
            .map(|&w| BigRational::from(BigInt::from(w)))
            .collect();
        Tableau::new(&self.points, &rhs)
    }

    /// Visits all points whose lifted value under the functional `(alpha, v)`
    /// is zero, within a relative tolerance. The functional refers to the
    /// rescaled lifting used by the floating-point solver.
    fn scan_tight_float(&self, alpha: &[f64], v: f64, mut hit: impl FnMut(u32)) {
        for (i, p) in self.floats.iter().enumerate() {
            let val: f64 = p.iter().zip(alpha).map(|(x, a)| x * a).sum::<f64>()
                + self.lifting_scaled[i];
            let scale = val.abs().max(v.abs()).max(1.0);
            if (val - v).abs() <= TIGHT_TOL * scale {
                hit(i as u32);
            }
        }
    }

    fn tight_set_float(&self, alpha: &[f64], v: f64) -> Vec<u32> {
        let mut out = Vec::new();
        self.scan_tight_float(alpha, v, |i| out.push(i));
        out
    }

    fn tight_set_exact(&self, alpha: &[BigRational], v: &BigRational) -> Vec<u32> {
        let mut out = Vec::new();
        for (i, p) in self.points.iter().enumerate() {
            let mut val = BigRational::from(BigInt::from(self.lifting[i]));
            for (x, a) in p.iter().zip(alpha) {
                val += BigRational::from(x.clone()) * a;
            }
            if &val == v {
                out.push(i as u32);
            }
        }
        out
    }
}

pub(crate) fn dedup_points(points: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    out
}

pub(crate) fn bitset_words(n: usize) -> usize {
    n.div_ceil(64)
}

pub(crate) fn get_bit(bits: &[u64], i: u32) -> bool {
    bits[i as usize / 64] >> (i % 64) & 1 == 1
}

pub(crate) fn set_bit(bits: &mut [u64], i: u32) {
    bits[i as usize / 64] |= 1 << (i % 64);
}

/// A supporting functional, exact when the decision needed the fallback.
#[derive(Clone, Debug)]
pub enum Normal {
    Float(Vec<f64>),
    Exact(Vec<BigRational>),
}

/// Outcome of a node feasibility solve.
#[derive(Clone, Debug)]
pub struct LpAnswer {
    pub feasible: bool,
    pub normal: Option<Normal>,
    pub tight: Vec<u32>,
}

/// Counters accumulated by the solver entry points.
#[derive(Clone, Copy, Debug, Default)]
pub struct LpCounters {
    pub float_lps: u64,
    pub exact_lps: u64,
}

impl LpCounters {
    pub fn absorb(&mut self, other: LpCounters) {
        self.float_lps += other.float_lps;
        self.exact_lps += other.exact_lps;
    }
}

/// Pairwise lower-face feasibility, computed once per lifting. Bit `(i, j)`
/// says points `i` and `j` lie on a common lower face; the diagonal says the
/// lifted point touches the lower hull at all. A feasible set is pairwise
/// feasible, so a cleared bit prunes an extension candidate before any solve.
pub struct PairTable {
    words: usize,
    bits: Vec<u64>,
}

impl PairTable {
    /// Table with every pair marked feasible: prunes nothing. Stands in when
    /// the float prescreen is disabled and pruning must come from the exact
    /// solver alone.
    pub fn all(n: usize) -> PairTable {
        PairTable {
            words: bitset_words(n),
            bits: vec![u64::MAX; n * bitset_words(n)],
        }
    }

    pub fn build(pts: &LiftedPointSet, counters: &mut LpCounters) -> PairTable {
        let n = pts.len();
        let mut table = PairTable {
            words: bitset_words(n),
            bits: vec![0; n * bitset_words(n)],
        };
        for i in 0..n as u32 {
            if !table.alive(i) {
                let answer = node_answer(pts, &[i], counters);
                if answer.feasible {
                    table.mark_clique(&answer.tight);
                }
            }
        }
        for i in 0..n as u32 {
            if !table.alive(i) {
                continue;
            }
            for j in (i + 1)..n as u32 {
                if !table.alive(j) || table.feasible(i, j) {
                    continue;
                }
                let answer = node_answer(pts, &[i, j], counters);
                if answer.feasible {
                    table.mark_clique(&answer.tight);
                }
            }
        }
        table
    }

    /// Whether the lifted point lies on the lower hull.
    pub fn alive(&self, i: u32) -> bool {
        self.feasible(i, i)
    }

    pub fn feasible(&self, i: u32, j: u32) -> bool {
        get_bit(self.row(i), j)
    }

    pub fn row(&self, i: u32) -> &[u64] {
        &self.bits[i as usize * self.words..(i as usize + 1) * self.words]
    }

    /// Every pair inside one tight set shares that set's face.
    fn mark_clique(&mut self, tight: &[u32]) {
        for &a in tight {
            for &b in tight {
                set_bit(
                    &mut self.bits[a as usize * self.words..(a as usize + 1) * self.words],
                    b,
                );
            }
        }
    }
}

/// Tests whether a set of point indices lies in a common lower-hull face and
/// reports a witness functional with its full tight set.
pub fn node_answer(pts: &LiftedPointSet, node: &[u32], counters: &mut LpCounters) -> LpAnswer {
    let mut t = pts.float_tableau();
    let cols: Vec<usize> = node.iter().map(|&i| t.slack_col(i as usize)).collect();
    t.set_cost_sum(&cols);
    counters.float_lps += 1;
    let status = t.optimize();
    if status == LpStatus::Optimal {
        let obj = t.objective();
        if obj < ZERO_TOL {
            let alpha = t.alpha();
            let v = t.offset();
            let tight = pts.tight_set_float(&alpha, v);
            let unscaled = alpha.iter().map(|a| a * pts.scale).collect();
            return LpAnswer {
                feasible: true,
                tight,
                normal: Some(Normal::Float(unscaled)),
            };
        }
        if obj > POSITIVE_TOL {
            return LpAnswer {
                feasible: false,
                normal: None,
                tight: Vec::new(),
            };
        }
    }
    let mut t = pts.exact_tableau();
    let cols: Vec<usize> = node.iter().map(|&i| t.slack_col(i as usize)).collect();
    t.set_cost_sum(&cols);
    counters.exact_lps += 1;
    let status = t.optimize();
    assert_eq!(status, LpStatus::Optimal, "bounded objective");
    if !t.objective().is_zero() {
        return LpAnswer {
            feasible: false,
            normal: None,
            tight: Vec::new(),
        };
    }
    let alpha = t.alpha();
    let v = t.offset();
    LpAnswer {
        feasible: true,
        tight: pts.tight_set_exact(&alpha, &v),
        normal: Some(Normal::Exact(alpha)),
    }
}

/// Warm solver state for testing one-point extensions of a fixed feasible
/// node. The node's slacks stay pinned to zero for the context's lifetime.
///
/// Every optimal basis touched along the way witnesses a whole lower face;
/// all points of that face are recorded as certified, so candidates already
/// known to share a face with the node skip their solve.
pub struct NodeContext<'a> {
    pts: &'a LiftedPointSet,
    node: Vec<u32>,
    inner: Inner,
    certified: Vec<u64>,
}

enum Inner {
    Float(Tableau<f64>),
    Exact(Tableau<BigRational>),
}

fn certify_float_basis(pts: &LiftedPointSet, t: &Tableau<f64>, certified: &mut [u64]) {
    let alpha = t.alpha();
    let v = t.offset();
    pts.scan_tight_float(&alpha, v, |i| set_bit(certified, i));
}

fn certify_exact_basis(pts: &LiftedPointSet, t: &Tableau<BigRational>, certified: &mut [u64]) {
    let alpha = t.alpha();
    let v = t.offset();
    for i in pts.tight_set_exact(&alpha, &v) {
        set_bit(certified, i);
    }
}

impl<'a> NodeContext<'a> {
    /// Solves the node's feasibility problem; `None` when the node is not a
    /// face of the lower hull.
    pub fn new(
        pts: &'a LiftedPointSet,
        node: &[u32],
        counters: &mut LpCounters,
    ) -> Option<NodeContext<'a>> {
        let mut certified = vec![0u64; bitset_words(pts.len())];
        let mut t = pts.float_tableau();
        let cols: Vec<usize> = node.iter().map(|&i| t.slack_col(i as usize)).collect();
        t.set_cost_sum(&cols);
        counters.float_lps += 1;
        if t.optimize() == LpStatus::Optimal {
            let obj = t.objective();
            if obj < ZERO_TOL {
                for &c in &cols {
                    t.restrict(c);
                }
                certify_float_basis(pts, &t, &mut certified);
                return Some(NodeContext {
                    pts,
                    node: node.to_vec(),
                    inner: Inner::Float(t),
                    certified,
                });
            }
            if obj > POSITIVE_TOL {
                return None;
            }
        }
        Self::exact(pts, node, counters)
    }

    /// Like [`NodeContext::new`] but skips the float screen entirely, so the
    /// node decision and all later candidate tests run on the rational
    /// tableau.
    pub fn new_exact(
        pts: &'a LiftedPointSet,
        node: &[u32],
        counters: &mut LpCounters,
    ) -> Option<NodeContext<'a>> {
        Self::exact(pts, node, counters)
    }

    fn exact(
        pts: &'a LiftedPointSet,
        node: &[u32],
        counters: &mut LpCounters,
    ) -> Option<NodeContext<'a>> {
        let mut certified = vec![0u64; bitset_words(pts.len())];
        let mut t = pts.exact_tableau();
        let cols: Vec<usize> = node.iter().map(|&i| t.slack_col(i as usize)).collect();
        t.set_cost_sum(&cols);
        counters.exact_lps += 1;
        let status = t.optimize();
        assert_eq!(status, LpStatus::Optimal, "bounded objective");
        if !t.objective().is_zero() {
            return None;
        }
        for &c in &cols {
            t.restrict(c);
        }
        certify_exact_basis(pts, &t, &mut certified);
        Some(NodeContext {
            pts,
            node: node.to_vec(),
            inner: Inner::Exact(t),
            certified,
        })
    }

    pub fn node(&self) -> &[u32] {
        &self.node
    }

    /// Whether the node stays feasible after adjoining one more point.
    pub fn candidate_feasible(&mut self, candidate: u32, counters: &mut LpCounters) -> bool {
        if get_bit(&self.certified, candidate) {
            return true;
        }
        match &mut self.inner {
            Inner::Float(t) => {
                let col = t.slack_col(candidate as usize);
                if t.value(col).abs() <= ZERO_TOL {
                    certify_float_basis(self.pts, t, &mut self.certified);
                    set_bit(&mut self.certified, candidate);
                    return true;
                }
                t.set_cost_single(col, false);
                counters.float_lps += 1;
                if t.optimize() == LpStatus::Optimal {
                    let obj = t.objective();
                    if obj < ZERO_TOL {
                        certify_float_basis(self.pts, t, &mut self.certified);
                        set_bit(&mut self.certified, candidate);
                        return true;
                    }
                    if obj > POSITIVE_TOL {
                        return false;
                    }
                }
                let mut node: Vec<u32> = self.node.clone();
                node.push(candidate);
                node_feasible_exact(self.pts, &node, counters)
            }
            Inner::Exact(t) => {
                let col = t.slack_col(candidate as usize);
                t.set_cost_single(col, false);
                counters.exact_lps += 1;
                let status = t.optimize();
                assert_eq!(status, LpStatus::Optimal, "bounded objective");
                if t.objective().is_zero() {
                    certify_exact_basis(self.pts, t, &mut self.certified);
                    set_bit(&mut self.certified, candidate);
                    return true;
                }
                false
            }
        }
    }

    /// Clones the context one level down after `candidate` tested feasible,
    /// pinning the candidate's slack without re-solving the child node from
    /// a cold basis. Only possible while the current basis still sits on a
    /// face containing the candidate; the caller falls back to a fresh
    /// context otherwise.
    pub fn descend(&self, candidate: u32) -> Option<NodeContext<'a>> {
        let Inner::Float(t) = &self.inner else {
            return None;
        };
        let col = t.slack_col(candidate as usize);
        if t.value(col).abs() > ZERO_TOL {
            return None;
        }
        let mut t = t.clone();
        t.restrict(col);
        let mut node = self.node.clone();
        node.push(candidate);
        let mut certified = vec![0u64; bitset_words(self.pts.len())];
        certify_float_basis(self.pts, &t, &mut certified);
        Some(NodeContext {
            pts: self.pts,
            node,
            inner: Inner::Float(t),
            certified,
        })
    }
}

/// Exact lower-hull feasibility of a node, bypassing the float stage.
pub(crate) fn node_feasible_exact(
    pts: &LiftedPointSet,
    node: &[u32],
    counters: &mut LpCounters,
) -> bool {
    let mut t = pts.exact_tableau();
    let cols: Vec<usize> = node.iter().map(|&i| t.slack_col(i as usize)).collect();
    t.set_cost_sum(&cols);
    counters.exact_lps += 1;
    let status = t.optimize();
    assert_eq!(status, LpStatus::Optimal, "bounded objective");
    t.objective().is_zero()
}

/// Result of walking across one facet of a cell.
#[derive(Clone, Debug)]
pub enum PivotResult {
    /// The facet lies on the boundary of the hull.
    NoAdjacent,
    /// Tight set of the supporting functional on the far side of the facet.
    /// More than `dim + 1` indices here means the lifting is not generic.
    Adjacent(Vec<u32>),
}

/// Walks from a full-dimensional cell across the facet opposite `leave` and
/// reports the face found on the other side.
pub fn pivot_adjacent(
    pts: &LiftedPointSet,
    cell: &[u32],
    leave: u32,
    counters: &mut LpCounters,
) -> PivotResult {
    debug_assert!(cell.contains(&leave));
    let facet: Vec<u32> = cell.iter().copied().filter(|&i| i != leave).collect();

    let mut t = pts.float_tableau();
    let cols: Vec<usize> = facet.iter().map(|&i| t.slack_col(i as usize)).collect();
    t.set_cost_sum(&cols);
    counters.float_lps += 1;
    if t.optimize() == LpStatus::Optimal && t.objective() < ZERO_TOL {
        for &c in &cols {
            t.restrict(c);
        }
        let leave_col = t.slack_col(leave as usize);
        t.set_cost_single(leave_col, true);
        counters.float_lps += 1;
        match t.optimize() {
            LpStatus::Unbounded => return PivotResult::NoAdjacent,
            LpStatus::Optimal => {
                let gap = t.value(leave_col);
                if gap > POSITIVE_TOL {
                    let alpha = t.alpha();
                    let v = t.offset();
                    return PivotResult::Adjacent(pts.tight_set_float(&alpha, v));
                }
            }
            LpStatus::Stalled => {}
        }
    }

    let mut t = pts.exact_tableau();
    let cols: Vec<usize> = facet.iter().map(|&i| t.slack_col(i as usize)).collect();
    t.set_cost_sum(&cols);
    counters.exact_lps += 1;
    let status = t.optimize();
    assert_eq!(status, LpStatus::Optimal, "bounded objective");
    if !t.objective().is_zero() {
        return PivotResult::NoAdjacent;
    }
    for &c in &cols {
        t.restrict(c);
    }
    let leave_col = t.slack_col(leave as usize);
    t.set_cost_single(leave_col, true);
    counters.exact_lps += 1;
    match t.optimize() {
        LpStatus::Unbounded => PivotResult::NoAdjacent,
        LpStatus::Optimal => {
            let alpha = t.alpha();
            let v = t.offset();
            PivotResult::Adjacent(pts.tight_set_exact(&alpha, &v))
        }
        LpStatus::Stalled => unreachable!("exact solves do not stall"),
    }
}
