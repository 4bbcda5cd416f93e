use bintope::intlinalg::{det_exact, is_unimodular, smith_normal_form, IntMatrix};
use bintope::testing::rank_rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::time::{Duration, Instant};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut t_snf = Duration::ZERO;
    let mut t_mul = Duration::ZERO;
    let mut t_uni = Duration::ZERO;
    let mut t_rank = Duration::ZERO;
    let mut t_det = Duration::ZERO;
    for _ in 0..1000 {
        let rows = rng.gen_range(1..=50);
        let cols = rng.gen_range(1..=50);
        let mut a = IntMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                a[(i, j)] = num_bigint::BigInt::from(rng.gen_range(-10..=10i64));
            }
        }
        let t = Instant::now();
        let snf = smith_normal_form(&a);
        t_snf += t.elapsed();
        let t = Instant::now();
        let product = snf.p.mul(&a).unwrap().mul(&snf.q).unwrap();
        assert_eq!(product, snf.diagonal_matrix());
        t_mul += t.elapsed();
        let t = Instant::now();
        assert!(is_unimodular(&snf.p).unwrap());
        assert!(is_unimodular(&snf.q).unwrap());
        t_uni += t.elapsed();
        let t = Instant::now();
        let _ = det_exact(&snf.p).unwrap();
        t_det += t.elapsed();
        let t = Instant::now();
        assert_eq!(snf.rank(), rank_rational(&a));
        t_rank += t.elapsed();
    }
    println!(
        "snf={:.1}s mul={:.1}s unimod={:.1}s (det P alone={:.1}s) rank={:.1}s",
        t_snf.as_secs_f64(),
        t_mul.as_secs_f64(),
        t_uni.as_secs_f64(),
        t_det.as_secs_f64(),
        t_rank.as_secs_f64()
    );
    std::io::stdout().flush().unwrap();
}
