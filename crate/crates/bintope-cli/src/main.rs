use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::json;

use bintope::binomial::BinomialError;
use bintope::homotopy::{witness_set, WitnessError, WitnessOptions};
use bintope::intlinalg::{smith_normal_form_with, IntMatrix, SnfOptions};
use bintope::mspace;
use bintope::subdivision::{degree, SubdivideOptions, SubdivisionError};
use bintope::BinomialSystem;

const EXIT_INCONSISTENT: u8 = 2;
const EXIT_DEGENERACY: u8 = 3;
const EXIT_INPUT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "bintope",
    version,
    about = "Solve Laurent binomial systems: solution structure, degrees, witness points"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Smith normal form of an integer matrix
    Snf {
        /// Matrix file: a "rows cols" header line, then one row per line
        matrix: PathBuf,
        /// Make each divisor divide the next
        #[arg(long)]
        divisor_chain: bool,
    },
    /// Dimension and component count of a binomial system's solution set
    Analyze {
        /// System description in JSON
        system: PathBuf,
    },
    /// Degree of the solution set, via a regular subdivision of the cut support
    Degree {
        /// System description in JSON
        system: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Write the subdivision cells to this file as JSON
        #[arg(long)]
        cells: Option<PathBuf>,
        /// Disable pivot walks between adjacent cells
        #[arg(long)]
        no_pivoting: bool,
    },
    /// Witness points on a solution component, one per unit of degree
    Witness {
        /// System description in JSON
        system: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Torsion residues selecting the component, comma separated
        #[arg(long, value_parser = parse_component)]
        component: Option<ComponentArg>,
    },
    /// Emit the critical point system of an m-by-k master space superpotential
    Mspace {
        m: usize,
        k: usize,
        /// Write to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Degree benchmark over superpotential systems, CSV on stdout
    Bench {
        /// Largest grid side to include
        #[arg(long, default_value_t = 4)]
        max: usize,
        /// Total wall-clock budget in seconds
        #[arg(long, default_value_t = 300.0)]
        budget: f64,
        /// Worker threads, 0 for the rayon default
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Lifting seed; falls back to BINTOPE_SEED, then 0
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Lifting seed; falls back to BINTOPE_SEED, then 0
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, 0 for the rayon default
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Wall-clock budget in seconds; exceeding it truncates the result
    #[arg(long)]
    budget: Option<f64>,
}

#[derive(Clone)]
struct ComponentArg(Vec<BigInt>);

fn parse_component(text: &str) -> Result<ComponentArg, String> {
    text.split(',')
        .map(|part| part.trim().parse::<BigInt>().map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()
        .map(ComponentArg)
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn new(code: u8, error: anyhow::Error) -> Failure {
        Failure { code, error }
    }
}

fn input_error<T, E>(result: Result<T, E>) -> Result<T, Failure>
where
    E: Into<anyhow::Error>,
{
    result.map_err(|e| Failure::new(EXIT_INPUT, e.into()))
}

fn classify_binomial(error: BinomialError) -> Failure {
    let code = match error {
        BinomialError::Inconsistent { .. } => EXIT_INCONSISTENT,
        _ => EXIT_INPUT,
    };
    Failure::new(code, error.into())
}

fn classify_subdivision(error: SubdivisionError) -> Failure {
    let code = match error {
        SubdivisionError::DegeneracyExhausted { .. } => EXIT_DEGENERACY,
        SubdivisionError::DegenerateLifting => 1,
    };
    Failure::new(code, error.into())
}

fn classify_witness(error: WitnessError) -> Failure {
    match error {
        WitnessError::Analyze(e) => classify_binomial(e),
        WitnessError::Subdivision(e) => classify_subdivision(e),
        other => Failure::new(1, other.into()),
    }
}

/// Restores default SIGPIPE handling so piping into tools like `head`
/// terminates the process instead of panicking on a failed write.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Snf {
            matrix,
            divisor_chain,
        } => cmd_snf(&matrix, divisor_chain),
        Command::Analyze { system } => cmd_analyze(&system),
        Command::Degree {
            system,
            run,
            cells,
            no_pivoting,
        } => cmd_degree(&system, &run, cells.as_deref(), no_pivoting),
        Command::Witness {
            system,
            run,
            component,
        } => cmd_witness(&system, &run, component.map(|c| c.0)),
        Command::Mspace { m, k, out } => cmd_mspace(m, k, out.as_deref()),
        Command::Bench {
            max,
            budget,
            threads,
            seed,
        } => cmd_bench(max, budget, threads, seed),
    }
}

fn read_to_string(path: &std::path::Path) -> Result<String, Failure> {
    input_error(fs::read_to_string(path).with_context(|| format!("reading {}", path.display())))
}

fn load_system(path: &std::path::Path) -> Result<BinomialSystem, Failure> {
    let text = read_to_string(path)?;
    BinomialSystem::from_json(&text).map_err(classify_binomial)
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("BINTOPE_SEED") {
        Ok(value) => input_error(
            value
                .trim()
                .parse::<u64>()
                .map_err(|e| anyhow!("invalid BINTOPE_SEED {value:?}: {e}")),
        ),
        Err(_) => Ok(0),
    }
}

fn deadline_from(budget: Option<f64>) -> Result<Option<Instant>, Failure> {
    match budget {
        None => Ok(None),
        Some(secs) if secs.is_finite() && secs > 0.0 => {
            Ok(Some(Instant::now() + Duration::from_secs_f64(secs)))
        }
        Some(secs) => Err(Failure::new(
            EXIT_INPUT,
            anyhow!("budget must be a positive number of seconds, got {secs}"),
        )),
    }
}

/// JSON value for a nonnegative count: a plain number when it fits in u64,
/// a decimal string otherwise.
fn count_json(value: &BigInt) -> serde_json::Value {
    match value.to_u64() {
        Some(v) => json!(v),
        None => json!(value.to_string()),
    }
}

fn cmd_snf(path: &std::path::Path, divisor_chain: bool) -> Result<(), Failure> {
    let text = read_to_string(path)?;
    let matrix = input_error(IntMatrix::from_text(&text))?;
    let snf = smith_normal_form_with(&matrix, SnfOptions { divisor_chain });
    let divisors: Vec<String> = snf.divisors.iter().map(|d| d.to_string()).collect();
    print!(
        "rank: {}\ndivisors: {}\nP:\n{}Q:\n{}",
        snf.rank(),
        divisors.join(" "),
        snf.p.to_text(),
        snf.q.to_text()
    );
    Ok(())
}

fn cmd_analyze(path: &std::path::Path) -> Result<(), Failure> {
    let system = load_system(path)?;
    let structure = system.analyze().map_err(classify_binomial)?;
    let divisors: Vec<String> = structure
        .snf()
        .divisors
        .iter()
        .map(|d| d.to_string())
        .collect();
    println!(
        "dimension: {}\ncomponents: {}\ndivisors: {}",
        structure.dimension(),
        structure.component_count(),
        divisors.join(" ")
    );
    Ok(())
}

fn cmd_degree(
    path: &std::path::Path,
    run: &RunArgs,
    cells_path: Option<&std::path::Path>,
    no_pivoting: bool,
) -> Result<(), Failure> {
    let system = load_system(path)?;
    let structure = system.analyze().map_err(classify_binomial)?;
    let opts = SubdivideOptions {
        workers: run.threads,
        pivoting: !no_pivoting,
        seed: resolve_seed(run.seed)?,
        deadline: deadline_from(run.budget)?,
    };
    let started = Instant::now();
    let report = degree(&structure, &opts).map_err(classify_subdivision)?;

    if let Some(out) = cells_path {
        let doc = cells_document(report.subdivision.as_ref());
        let text = serde_json::to_string_pretty(&doc).expect("cell document serializes");
        input_error(
            fs::write(out, text + "\n").with_context(|| format!("writing {}", out.display())),
        )?;
    }

    if let Some(sub) = report.subdivision.as_ref() {
        eprintln!(
            "stats: cells={} float_lps={} exact_lps={} nodes={} walks={} relifts={} time_s={:.3}",
            sub.cells.len(),
            sub.stats.float_lps,
            sub.stats.exact_lps,
            sub.stats.nodes_expanded,
            sub.stats.pivot_walks,
            sub.stats.relifts,
            started.elapsed().as_secs_f64()
        );
    }

    println!("degree: {}", report.degree);
    if report.truncated {
        println!("truncated: true");
    }
    Ok(())
}

fn cells_document(subdivision: Option<&bintope::subdivision::Subdivision>) -> serde_json::Value {
    let Some(sub) = subdivision else {
        return json!({ "seed": serde_json::Value::Null, "cells": [] });
    };
    let cells: Vec<serde_json::Value> = sub
        .cells
        .iter()
        .map(|cell| {
            let normal: Vec<String> = cell.normal.iter().map(|c| c.to_string()).collect();
            json!({
                "indices": cell.indices,
                "normal": normal,
                "nvol": count_json(&cell.nvol),
            })
        })
        .collect();
    json!({ "seed": sub.lifting_seed, "cells": cells })
}

fn cmd_witness(
    path: &std::path::Path,
    run: &RunArgs,
    component: Option<Vec<BigInt>>,
) -> Result<(), Failure> {
    let system = load_system(path)?;
    let opts = WitnessOptions {
        seed: resolve_seed(run.seed)?,
        workers: run.threads,
        deadline: deadline_from(run.budget)?,
        component,
    };
    let started = Instant::now();
    let set = witness_set(&system, &opts).map_err(classify_witness)?;

    eprintln!(
        "stats: expected={} found={} failed={} diverged={} time_s={:.3}",
        set.expected,
        set.points.len(),
        set.failed_paths,
        set.diverged_paths,
        started.elapsed().as_secs_f64()
    );

    let points: Vec<serde_json::Value> = set
        .points
        .iter()
        .map(|p| {
            let coords: Vec<[f64; 2]> = p.x.iter().map(|z| [z.re, z.im]).collect();
            let params: Vec<[f64; 2]> = p.parameters.iter().map(|z| [z.re, z.im]).collect();
            json!({
                "x": coords,
                "parameters": params,
                "residual": p.residual,
                "cut_residual": p.cut_residual,
            })
        })
        .collect();
    let doc = json!({
        "expected": count_json(&set.expected),
        "complete": set.complete,
        "truncated": set.truncated,
        "failed_paths": set.failed_paths,
        "diverged_paths": set.diverged_paths,
        "points": points,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&doc).expect("witness document serializes")
    );
    Ok(())
}

fn cmd_mspace(m: usize, k: usize, out: Option<&std::path::Path>) -> Result<(), Failure> {
    let system = input_error(mspace::generate(m, k))?;
    let text = system.to_json().map_err(classify_binomial)?;
    match out {
        Some(path) => input_error(
            fs::write(path, text.clone() + "\n")
                .with_context(|| format!("writing {}", path.display())),
        )?,
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_bench(max: usize, budget: f64, threads: usize, seed: Option<u64>) -> Result<(), Failure> {
    if !(budget.is_finite() && budget > 0.0) {
        return Err(Failure::new(
            EXIT_INPUT,
            anyhow!("budget must be a positive number of seconds, got {budget}"),
        ));
    }
    let seed = resolve_seed(seed)?;
    let rows = mspace::benchmark(max, Duration::from_secs_f64(budget), threads, seed);
    println!("{}", mspace::BenchRow::CSV_HEADER);
    for row in &rows {
        println!("{}", row.to_csv());
    }
    Ok(())
}
