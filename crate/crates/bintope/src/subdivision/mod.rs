//! Regular simplicial subdivisions of lattice point configurations and the
//! normalized volumes they carry.
//!
//! Points are lifted by random integer heights and the lower hull of the
//! lifted configuration is explored cell by cell. Two traversal moves drive
//! the search: extension grows feasible index sets one point at a time in
//! increasing index order, and pivoting walks from a found cell across one
//! of its facets to the neighbor on the other side. Extension alone already
//! reaches every cell, because any subset of a lower-hull face is itself a
//! lower-hull face; pivot walks are an optional shortcut that spreads the
//! frontier faster. Every candidate cell is certified in exact rational
//! arithmetic before it is recorded, so the resulting subdivision is
//! independent of worker count, pivoting, and floating-point behavior.
//!
//! A lifting that puts more than `dim + 1` points on one lower face is not
//! generic. Certification detects this and the driver re-lifts with a fresh
//! seed; fixed-lifting entry points report it as an error instead.

mod certify;

use std::collections::VecDeque;
use std::sync::Arc;
use std::time::Instant;

use dashmap::mapref::entry::Entry;
use dashmap::DashMap;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::binomial::SolutionStructure;
use crate::lpkernel::{
    bitset_words, get_bit, pivot_adjacent, LiftedPointSet, LpCounters, NodeContext, PairTable,
    PivotResult,
};
use crate::numeric::splitmix64;
use certify::{certify_cell, Certificate};

/// Maximum number of fresh liftings tried before giving up on a
/// configuration.
const MAX_LIFT_ATTEMPTS: u32 = 32;

/// Number of facet walks launched from each newly found cell.
const PIVOT_FANOUT: usize = 10;

/// Nodes larger than this expand depth-first inside their parent's task,
/// reusing the warm solver state instead of re-solving each child cold.
/// Nodes at or below the cap fan out as separate tasks, which keeps the
/// task pool populated with units of comparable size.
const TASK_SIZE_CAP: usize = 3;

#[derive(Debug, Error)]
pub enum SubdivisionError {
    /// The supplied lifting puts too many points on one lower face.
    #[error("the lifting is not generic for this configuration")]
    DegenerateLifting,
    /// Every attempted lifting was degenerate.
    #[error("no generic lifting found after {attempts} attempts")]
    DegeneracyExhausted { attempts: u32 },
}

/// One full-dimensional cell of a regular subdivision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    /// Sorted indices of the `dim + 1` points spanning the cell.
    pub indices: Vec<u32>,
    /// Inner normal of the lower-hull face, solved exactly from the cell.
    pub normal: Vec<BigRational>,
    /// Normalized volume, the absolute determinant of the edge matrix.
    pub nvol: BigInt,
}

/// Counters describing the work done by a subdivision run. Counts accumulate
/// across re-lifts.
#[derive(Clone, Copy, Debug, Default)]
pub struct SubdivisionStats {
    pub float_lps: u64,
    pub exact_lps: u64,
    pub nodes_expanded: u64,
    pub pivot_walks: u64,
    pub relifts: u32,
}

/// A regular simplicial subdivision of a point configuration.
#[derive(Clone, Debug)]
pub struct Subdivision {
    /// Cells sorted by their index vectors.
    pub cells: Vec<Cell>,
    /// Seed of the lifting that produced the subdivision, when one was
    /// drawn from a seed.
    pub lifting_seed: Option<u64>,
    /// Whether the traversal stopped at the deadline before exhausting the
    /// frontier. A truncated subdivision undercounts cells.
    pub truncated: bool,
    pub stats: SubdivisionStats,
}

impl Subdivision {
    /// Sum of the normalized volumes of all cells.
    pub fn normalized_volume(&self) -> BigInt {
        self.cells.iter().map(|c| &c.nvol).sum()
    }
}

/// Tuning knobs for the subdivision traversal.
#[derive(Clone, Debug)]
pub struct SubdivideOptions {
    /// Worker threads for the traversal; `0` uses the rayon default.
    pub workers: usize,
    /// Launch facet walks from newly found cells in addition to lexicographic
    /// extension.
    pub pivoting: bool,
    /// Seed for the lifting and for pivot leaf selection.
    pub seed: u64,
    /// Optional wall-clock cutoff; the traversal stops between rounds once
    /// it has passed and marks the result truncated.
    pub deadline: Option<Instant>,
    /// Route every feasibility decision through the exact rational solver,
    /// skipping the float screen and the accelerators built on it. Slower by
    /// orders of magnitude; the cell set is identical.
    pub exact: bool,
}

impl Default for SubdivideOptions {
    fn default() -> Self {
        SubdivideOptions {
            workers: 0,
            pivoting: false,
            seed: 0,
            deadline: None,
            exact: false,
        }
    }
}

/// Degree of the solution set computed from a cut-support subdivision.
#[derive(Clone, Debug)]
pub struct DegreeReport {
    pub degree: BigInt,
    /// Whether the underlying traversal was cut short; if so the degree is
    /// a lower bound.
    pub truncated: bool,
    /// The subdivision behind the count, absent for zero-dimensional sets.
    pub subdivision: Option<Subdivision>,
}

/// Computes a regular simplicial subdivision of `points`, re-lifting with a
/// fresh seed whenever the lifting turns out degenerate.
///
/// Duplicate points are merged; cell indices refer to the deduplicated
/// sequence in first-occurrence order.
pub fn subdivide(
    points: &[Vec<BigInt>],
    opts: &SubdivideOptions,
) -> Result<Subdivision, SubdivisionError> {
    let mut stats = SubdivisionStats::default();
    let mut seed = opts.seed;
    for attempt in 0..MAX_LIFT_ATTEMPTS {
        let pts = LiftedPointSet::new(points.to_vec(), seed);
        match run_attempt(&pts, opts, seed, &mut stats) {
            Ok((cells, truncated)) => {
                stats.relifts = attempt;
                return Ok(Subdivision {
                    cells,
                    lifting_seed: Some(seed),
                    truncated,
                    stats,
                });
            }
            Err(DegenerateAttempt) => {
                seed = splitmix64(seed);
            }
        }
    }
    Err(SubdivisionError::DegeneracyExhausted {
        attempts: MAX_LIFT_ATTEMPTS,
    })
}

/// Computes the subdivision induced by the fixed lifting in `pts`. A
/// degenerate lifting is an error here; there is no re-lift.
pub fn subdivide_with(
    pts: &LiftedPointSet,
    opts: &SubdivideOptions,
) -> Result<Subdivision, SubdivisionError> {
    let mut stats = SubdivisionStats::default();
    match run_attempt(pts, opts, pts.seed().unwrap_or(0), &mut stats) {
        Ok((cells, truncated)) => Ok(Subdivision {
            cells,
            lifting_seed: pts.seed(),
            truncated,
            stats,
        }),
        Err(DegenerateAttempt) => Err(SubdivisionError::DegenerateLifting),
    }
}

/// Degree of the solution set described by `structure`: the normalized
/// volume of the convex hull of its cut support.
pub fn degree(
    structure: &SolutionStructure,
    opts: &SubdivideOptions,
) -> Result<DegreeReport, SubdivisionError> {
    if structure.dimension() == 0 {
        return Ok(DegreeReport {
            degree: BigInt::one(),
            truncated: false,
            subdivision: None,
        });
    }
    let support = structure.cut_support();
    let sub = subdivide(&support, opts)?;
    Ok(DegreeReport {
        degree: sub.normalized_volume(),
        truncated: sub.truncated,
        subdivision: Some(sub),
    })
}

struct DegenerateAttempt;

enum Task {
    Extend(Vec<u32>),
    Pivot(Arc<Vec<u32>>),
}

struct CellData {
    normal: Vec<BigRational>,
    nvol: BigInt,
}

type CellStore = DashMap<Box<[u32]>, Option<CellData>>;

#[derive(Default)]
struct TaskOutput {
    children: Vec<Vec<u32>>,
    fresh: Vec<Arc<Vec<u32>>>,
    counters: LpCounters,
    expanded: u64,
    walks: u64,
    degenerate: bool,
    truncated: bool,
}

fn run_attempt(
    pts: &LiftedPointSet,
    opts: &SubdivideOptions,
    traversal_seed: u64,
    stats: &mut SubdivisionStats,
) -> Result<(Vec<Cell>, bool), DegenerateAttempt> {
    let cell_size = pts.dim() + 1;
    let cells: CellStore = DashMap::new();
    let mut table_counters = LpCounters::default();
    let table = if opts.exact {
        PairTable::all(pts.len())
    } else {
        PairTable::build(pts, &mut table_counters)
    };
    stats.float_lps += table_counters.float_lps;
    stats.exact_lps += table_counters.exact_lps;
    let mut frontier: VecDeque<Task> = VecDeque::new();
    if pts.len() >= cell_size {
        for i in 0..pts.len() as u32 {
            if table.alive(i) {
                frontier.push_back(Task::Extend(vec![i]));
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .expect("building a traversal thread pool");
    let batch_cap = pool.current_num_threads().max(1) * 16;
    let tr = Traverse {
        pts,
        table: &table,
        cells: &cells,
        deadline: opts.deadline,
        cell_size,
        exact: opts.exact,
    };

    let mut truncated = false;
    let mut degenerate = false;
    while !frontier.is_empty() {
        if let Some(deadline) = opts.deadline {
            if Instant::now() >= deadline {
                truncated = true;
                break;
            }
        }
        let take = frontier.len().min(batch_cap);
        let batch: Vec<Task> = frontier.drain(..take).collect();
        let outputs: Vec<TaskOutput> = pool.install(|| {
            batch
                .into_par_iter()
                .map(|task| process_task(&tr, traversal_seed, task))
                .collect()
        });
        for out in outputs {
            stats.float_lps += out.counters.float_lps;
            stats.exact_lps += out.counters.exact_lps;
            stats.nodes_expanded += out.expanded;
            stats.pivot_walks += out.walks;
            degenerate |= out.degenerate;
            truncated |= out.truncated;
            for child in out.children {
                frontier.push_back(Task::Extend(child));
            }
            if opts.pivoting {
                for cell in out.fresh {
                    frontier.push_back(Task::Pivot(cell));
                }
            }
        }
        if degenerate {
            return Err(DegenerateAttempt);
        }
    }
    drop(tr);

    let mut found: Vec<Cell> = cells
        .into_iter()
        .filter_map(|(key, data)| {
            data.map(|d| Cell {
                indices: key.into_vec(),
                normal: d.normal,
                nvol: d.nvol,
            })
        })
        .collect();
    found.sort_by(|a, b| a.indices.cmp(&b.indices));
    Ok((found, truncated))
}

/// Shared read-only state of one traversal attempt.
struct Traverse<'a> {
    pts: &'a LiftedPointSet,
    table: &'a PairTable,
    cells: &'a CellStore,
    deadline: Option<Instant>,
    cell_size: usize,
    exact: bool,
}

fn process_task(tr: &Traverse, traversal_seed: u64, task: Task) -> TaskOutput {
    match task {
        Task::Extend(node) => extend_node(tr, node),
        Task::Pivot(cell) => walk_from_cell(tr.pts, traversal_seed, tr.cells, &cell),
    }
}

fn extend_node(tr: &Traverse, node: Vec<u32>) -> TaskOutput {
    let mut out = TaskOutput::default();
    out.expanded = 1;
    let ctx = if tr.exact {
        NodeContext::new_exact(tr.pts, &node, &mut out.counters)
    } else {
        NodeContext::new(tr.pts, &node, &mut out.counters)
    };
    let Some(mut ctx) = ctx else {
        return out;
    };
    let mut allowed = vec![!0u64; bitset_words(tr.pts.len())];
    for &member in &node {
        intersect(&mut allowed, tr.table.row(member));
    }
    expand_from(tr, &mut ctx, &node, &allowed, &mut out);
    out
}

/// Tests every extension candidate of `node`, recursing in place above the
/// task size cap while the warm context can be carried down.
fn expand_from(
    tr: &Traverse,
    ctx: &mut NodeContext,
    node: &[u32],
    allowed: &[u64],
    out: &mut TaskOutput,
) {
    if let Some(deadline) = tr.deadline {
        if Instant::now() >= deadline {
            out.truncated = true;
            return;
        }
    }
    let start = node.last().copied().expect("nodes are nonempty") + 1;
    for candidate in start..tr.pts.len() as u32 {
        if out.degenerate || out.truncated {
            return;
        }
        if !get_bit(allowed, candidate) {
            continue;
        }
        if !ctx.candidate_feasible(candidate, &mut out.counters) {
            continue;
        }
        let mut child = node.to_vec();
        child.push(candidate);
        if child.len() == tr.cell_size {
            match try_insert(tr.cells, tr.pts, child) {
                Inserted::New(cell) => out.fresh.push(cell),
                Inserted::Known | Inserted::Rejected => {}
                Inserted::Degenerate => {
                    out.degenerate = true;
                    return;
                }
            }
        } else if child.len() > TASK_SIZE_CAP {
            match ctx.descend(candidate) {
                Some(mut child_ctx) => {
                    out.expanded += 1;
                    let mut child_allowed = allowed.to_vec();
                    intersect(&mut child_allowed, tr.table.row(candidate));
                    expand_from(tr, &mut child_ctx, &child, &child_allowed, out);
                }
                None => out.children.push(child),
            }
        } else {
            out.children.push(child);
        }
    }
}

fn intersect(bits: &mut [u64], other: &[u64]) {
    for (a, b) in bits.iter_mut().zip(other) {
        *a &= b;
    }
}

fn walk_from_cell(
    pts: &LiftedPointSet,
    traversal_seed: u64,
    cells: &CellStore,
    cell: &[u32],
) -> TaskOutput {
    let mut out = TaskOutput::default();
    let size = cell.len();
    let mut rng = ChaCha8Rng::seed_from_u64(pivot_stream_seed(traversal_seed, cell));
    let fanout = size.min(PIVOT_FANOUT);
    let mut positions: Vec<usize> = (0..size).collect();
    for k in 0..fanout {
        let j = rng.gen_range(k..size);
        positions.swap(k, j);
    }

    for &pos in &positions[..fanout] {
        out.walks += 1;
        match pivot_adjacent(pts, cell, cell[pos], &mut out.counters) {
            PivotResult::NoAdjacent => {}
            PivotResult::Adjacent(tight) => {
                if tight.len() > size {
                    out.degenerate = true;
                    return out;
                }
                if tight.len() < size {
                    continue;
                }
                match try_insert(cells, pts, tight) {
                    Inserted::New(cell) => out.fresh.push(cell),
                    Inserted::Known | Inserted::Rejected => {}
                    Inserted::Degenerate => {
                        out.degenerate = true;
                        return out;
                    }
                }
            }
        }
    }
    out
}

enum Inserted {
    New(Arc<Vec<u32>>),
    Known,
    Rejected,
    Degenerate,
}

/// Claims the cell in the shared store, then certifies it exactly. The claim
/// makes concurrent discoverers of the same cell skip the duplicate
/// certification; a claim that fails certification is withdrawn.
fn try_insert(cells: &CellStore, pts: &LiftedPointSet, cell: Vec<u32>) -> Inserted {
    debug_assert!(cell.windows(2).all(|w| w[0] < w[1]));
    let key: Box<[u32]> = cell.as_slice().into();
    match cells.entry(key) {
        Entry::Occupied(_) => return Inserted::Known,
        Entry::Vacant(slot) => {
            slot.insert(None);
        }
    }
    match certify_cell(pts, &cell) {
        Certificate::Valid { normal, nvol } => {
            cells.insert(cell.as_slice().into(), Some(CellData { normal, nvol }));
            Inserted::New(Arc::new(cell))
        }
        Certificate::Invalid => {
            cells.remove(cell.as_slice());
            Inserted::Rejected
        }
        Certificate::Degenerate => Inserted::Degenerate,
    }
}

fn pivot_stream_seed(traversal_seed: u64, cell: &[u32]) -> u64 {
    let mut h = traversal_seed ^ 0x9e37_79b9_7f4a_7c15;
    for &i in cell {
        h = splitmix64(h ^ u64::from(i));
    }
    h
}
