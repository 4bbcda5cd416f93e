//! Criterion benchmarks for the three kernels behind the degree pipeline:
//! Smith normal forms, lower-face feasibility tables, and full subdivisions.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bintope::intlinalg::{smith_normal_form, IntMatrix};
use bintope::lpkernel::{LiftedPointSet, LpCounters, PairTable};
use bintope::mspace;
use bintope::subdivision::{degree, SubdivideOptions};
use bintope::witness_set;
use bintope::WitnessOptions;

fn random_matrix(rows: usize, cols: usize, seed: u64) -> IntMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = IntMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            a[(i, j)] = num_bigint::BigInt::from(rng.gen_range(-10..=10i64));
        }
    }
    a
}

fn cut_support(m: usize, k: usize) -> Vec<Vec<num_bigint::BigInt>> {
    mspace::generate(m, k)
        .expect("valid sizes")
        .analyze()
        .expect("consistent system")
        .cut_support()
}

fn bench_snf(c: &mut Criterion) {
    let small = random_matrix(10, 10, 1);
    let medium = random_matrix(25, 25, 2);
    c.bench_function("snf 10x10", |b| b.iter(|| smith_normal_form(&small)));
    c.bench_function("snf 25x25", |b| b.iter(|| smith_normal_form(&medium)));
}

fn bench_pair_table(c: &mut Criterion) {
    let support = cut_support(2, 3);
    c.bench_function("pair table (2,3) support", |b| {
        b.iter_batched(
            || LiftedPointSet::new(support.clone(), 1),
            |pts| {
                let mut counters = LpCounters::default();
                PairTable::build(&pts, &mut counters)
            },
            BatchSize::SmallInput,
        )
    });
}

fn bench_degree(c: &mut Criterion) {
    let mut group = c.benchmark_group("degree");
    group.sample_size(10);
    for (m, k) in [(2, 2), (2, 3)] {
        let structure = mspace::generate(m, k)
            .expect("valid sizes")
            .analyze()
            .expect("consistent system");
        group.bench_function(format!("({m},{k}) single worker"), |b| {
            b.iter(|| {
                let opts = SubdivideOptions {
                    workers: 1,
                    pivoting: true,
                    seed: 1,
                    deadline: None,
                };
                degree(&structure, &opts).expect("generic lifting")
            })
        });
    }
    group.finish();
}

fn bench_witness(c: &mut Criterion) {
    let system = mspace::generate(1, 2).expect("valid sizes");
    let mut group = c.benchmark_group("witness");
    group.sample_size(10);
    group.bench_function("(1,2) witness set", |b| {
        b.iter(|| {
            witness_set(
                &system,
                &WitnessOptions {
                    seed: 5,
                    workers: 1,
                    ..WitnessOptions::default()
                },
            )
            .expect("tracking succeeds")
        })
    });
    group.finish();
}

criterion_group!(
    kernels,
    bench_snf,
    bench_pair_table,
    bench_degree,
    bench_witness
);
criterion_main!(kernels);
