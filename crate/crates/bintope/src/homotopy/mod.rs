//! Witness points for the toric components of a binomial system.
//!
//! A component of dimension `d` is parametrized monomially by `d` free
//! parameters. Cutting it with `d` random affine hyperplanes leaves finitely
//! many points, as many as the component's degree. The hyperplanes pull back
//! to a square sparse system in the parameters whose common support is the
//! component's cut support, so the degree equals the normalized volume of
//! that support and each cell of a regular subdivision seeds a polyhedral
//! homotopy: the cell's binomial start system contributes exactly its
//! normalized volume in paths, and the paths together reach every cut point.

mod system;
mod track;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::Instant;
use thiserror::Error;

use crate::binomial::{BinomialError, BinomialSystem};
use crate::lpkernel::LiftedPointSet;
use crate::subdivision::{subdivide, SubdivideOptions, SubdivisionError};
use system::CutSystem;
use track::{track, PathStatus};

/// Residual bound a witness point must meet in both the original system and
/// the cut equations.
pub const WITNESS_RESIDUAL_TOL: f64 = 1e-6;

/// Relative max-norm distance under which two endpoints count as the same
/// witness point.
const DEDUP_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error(transparent)]
    Analyze(#[from] BinomialError),
    #[error(transparent)]
    Subdivision(#[from] SubdivisionError),
    /// The random hyperplane coefficients hit a measure-zero degeneracy in
    /// some start system; rerun with another seed.
    #[error("hyperplane coefficients were degenerate for a start system")]
    UnluckyCoefficients,
}

#[derive(Clone, Debug)]
pub struct WitnessOptions {
    pub seed: u64,
    /// Worker threads for subdivision and path tracking; `0` uses the rayon
    /// default.
    pub workers: usize,
    /// Optional wall-clock cutoff, forwarded to the subdivision.
    pub deadline: Option<Instant>,
    /// Torsion residues selecting the component to cut; defaults to the
    /// identity component (all zero).
    pub component: Option<Vec<BigInt>>,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions {
            seed: 0,
            workers: 0,
            deadline: None,
            component: None,
        }
    }
}

/// One point of the witness set.
#[derive(Clone, Debug)]
pub struct WitnessPoint {
    /// Coordinates in the original variables.
    pub x: Vec<Complex64>,
    /// The free parameters that produced `x` through the component
    /// parametrization.
    pub parameters: Vec<Complex64>,
    /// Largest equation residual of the original system at `x`.
    pub residual: f64,
    /// Largest residual of the cut hyperplanes at the parameters.
    pub cut_residual: f64,
}

#[derive(Clone, Debug)]
pub struct WitnessSet {
    /// Distinct witness points, sorted by the real part of the first
    /// coordinate.
    pub points: Vec<WitnessPoint>,
    /// The component's degree as counted by the subdivision.
    pub expected: BigInt,
    pub failed_paths: usize,
    pub diverged_paths: usize,
    /// Whether the subdivision hit its deadline.
    pub truncated: bool,
    /// True when every path converged and the distinct endpoints match the
    /// expected count.
    pub complete: bool,
}

/// Computes a witness set for one component of the system's solution set.
pub fn witness_set(
    system: &BinomialSystem,
    opts: &WitnessOptions,
) -> Result<WitnessSet, WitnessError> {
    let structure = system.analyze()?;
    let rank = structure.snf().rank();
    let indices = opts
        .component
        .clone()
        .unwrap_or_else(|| vec![BigInt::zero(); rank]);
    let component = structure.component(&indices);
    let d = structure.dimension();

    if d == 0 {
        let x = component.evaluate(&[]);
        let residual = system.residual(&x);
        let complete = residual < WITNESS_RESIDUAL_TOL;
        return Ok(WitnessSet {
            points: vec![WitnessPoint {
                x,
                parameters: Vec::new(),
                residual,
                cut_residual: 0.0,
            }],
            expected: BigInt::one(),
            failed_paths: 0,
            diverged_paths: 0,
            truncated: false,
            complete,
        });
    }

    let support = structure.cut_support();
    let sub_opts = SubdivideOptions {
        workers: opts.workers,
        pivoting: true,
        seed: opts.seed,
        deadline: opts.deadline,
    };
    let sub = subdivide(&support, &sub_opts)?;
    let expected = sub.normalized_volume();
    let pts = LiftedPointSet::new(
        support.clone(),
        sub.lifting_seed.expect("subdivide always seeds liftings"),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9_7f4a_7c15);
    let cut = CutSystem::new(&structure, &component, support, &mut rng);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .expect("building a tracking thread pool");
    let tracked: Result<Vec<Vec<track::PathOutcome>>, WitnessError> = pool.install(|| {
        sub.cells
            .par_iter()
            .map(|cell| {
                let (homotopy, starts) = cut.cell_homotopy(&pts, cell)?;
                debug_assert_eq!(BigInt::from(starts.len()), cell.nvol);
                Ok(starts.into_iter().map(|s| track(&homotopy, s)).collect())
            })
            .collect()
    });

    let mut failed = 0usize;
    let mut diverged = 0usize;
    let mut endpoints: Vec<Vec<Complex64>> = Vec::new();
    for outcome in tracked?.into_iter().flatten() {
        match outcome.status {
            PathStatus::Converged => {
                if !endpoints.iter().any(|seen| is_duplicate(seen, &outcome.y)) {
                    endpoints.push(outcome.y);
                }
            }
            PathStatus::Failed => failed += 1,
            PathStatus::Diverged => diverged += 1,
        }
    }

    let mut points: Vec<WitnessPoint> = endpoints
        .into_iter()
        .map(|t| {
            let x = component.evaluate(&t);
            WitnessPoint {
                residual: system.residual(&x),
                cut_residual: cut.residual(&t),
                x,
                parameters: t,
            }
        })
        .collect();
    points.sort_by(|a, b| {
        let key = |p: &WitnessPoint| {
            p.x.first()
                .map_or((0.0, 0.0), |c| (c.re, c.im))
        };
        let (ra, ia) = key(a);
        let (rb, ib) = key(b);
        ra.total_cmp(&rb).then(ia.total_cmp(&ib))
    });

    let complete = !sub.truncated
        && failed == 0
        && diverged == 0
        && BigInt::from(points.len()) == expected;
    Ok(WitnessSet {
        points,
        expected,
        failed_paths: failed,
        diverged_paths: diverged,
        truncated: sub.truncated,
        complete,
    })
}

fn is_duplicate(a: &[Complex64], b: &[Complex64]) -> bool {
    let scale = a.iter().map(|c| c.norm()).fold(1.0f64, f64::max);
    let dist = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0f64, f64::max);
    dist < DEDUP_TOL * scale
}
