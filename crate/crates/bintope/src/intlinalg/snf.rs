//! Smith normal form over the integers with accumulated unimodular row and
//! column transforms.

use super::{IntMatrix, SnfResult};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

/// Submatrix size (in entries) above which row updates run on the rayon pool.
/// Updates within one reduction step are independent per row, so the result
/// is identical to the sequential order.
const PAR_THRESHOLD: usize = 1 << 15;

#[derive(Clone, Copy, Debug, Default)]
pub struct SnfOptions {
    /// Also enforce the divisibility chain `d_1 | d_2 | ... | d_r`. The
    /// solver pipeline does not need it, so it is off by default.
    pub divisor_chain: bool,
}

/// Smith normal form with default options: `P * A * Q` diagonal, divisors
/// positive, no divisibility chain.
pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    smith_normal_form_with(a, SnfOptions::default())
}

pub fn smith_normal_form_with(a: &IntMatrix, opts: SnfOptions) -> SnfResult {
    let (n, m) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut p = IntMatrix::identity(n);
    let mut q = IntMatrix::identity(m);

    let mut t = 0;
    while t < n.min(m) {
        let Some((pi, pj)) = min_abs_pivot(&d, t) else {
            break;
        };
        d.swap_rows(t, pi);
        p.swap_rows(t, pi);
        d.swap_cols(t, pj);
        q.swap_cols(t, pj);
        pivot_reduce(&mut d, &mut p, &mut q, t);
        if d[(t, t)].is_negative() {
            negate_row(&mut d, &mut p, t);
        }
        t += 1;
    }
    let rank = t;

    if opts.divisor_chain {
        enforce_divisor_chain(&mut d, &mut p, &mut q, rank);
    }

    let divisors = (0..rank).map(|i| d[(i, i)].clone()).collect();
    SnfResult { p, q, divisors }
}

/// Entry of minimal nonzero absolute value in the trailing submatrix. Small
/// pivots keep the Euclidean quotients, and with them coefficient growth,
/// small.
fn min_abs_pivot(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.rows() {
        for (j, v) in d.row(i).iter().enumerate().skip(t) {
            if v.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if d[(bi, bj)].magnitude() <= v.magnitude() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// Quotient `q` minimizing `|a - q*b|`, so the remainder satisfies
/// `|a - q*b| <= |b| / 2`.
fn nearest_quotient(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    if r.magnitude() << 1 > *b.magnitude() {
        if r.sign() == b.sign() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Clears row and column `t` of `d` (outside the pivot) by unimodular
/// transforms, running the Euclidean algorithm directly on rows and columns
/// with round-to-nearest quotients. One-shot Bezout combinations would zero
/// each entry in a single step but multiply whole rows by gcd cofactors,
/// which blows coefficients up superexponentially on matrices this library
/// routinely sees; nearest-quotient reduction keeps every intermediate entry
/// within a factor of the data it replaces.
///
/// Zeroing the pivot row can swap a column with nonzero entries below the
/// pivot back into position `t`, hence the outer loop. Every such swap
/// strictly shrinks the pivot, so the loop terminates.
fn pivot_reduce(d: &mut IntMatrix, p: &mut IntMatrix, q: &mut IntMatrix, t: usize) {
    loop {
        column_pass(d, p, t);
        if !row_pass(d, q, t) {
            return;
        }
    }
}

/// Reduces column `t` below the pivot to zero by repeated rounds of
/// nearest-quotient row subtractions, re-selecting the smallest column entry
/// as the pivot between rounds.
fn column_pass(d: &mut IntMatrix, p: &mut IntMatrix, t: usize) {
    let n = d.rows();
    loop {
        let mut best = t;
        for i in t..n {
            if d[(i, t)].is_zero() {
                continue;
            }
            if d[(best, t)].is_zero() || d[(i, t)].magnitude() < d[(best, t)].magnitude() {
                best = i;
            }
        }
        if best != t {
            d.swap_rows(t, best);
            p.swap_rows(t, best);
        }
        let mut factors: Vec<Option<BigInt>> = vec![None; n];
        let mut any = false;
        for i in t + 1..n {
            if d[(i, t)].is_zero() {
                continue;
            }
            let f = nearest_quotient(&d[(i, t)], &d[(t, t)]);
            if f.is_zero() {
                // The entry is already below half the pivot; the next round
                // promotes it.
                any = true;
                continue;
            }
            factors[i] = Some(f);
            any = true;
        }
        if !any {
            return;
        }
        apply_row_factors(d, p, t, &factors);
    }
}

/// Reduces row `t` right of the pivot to zero, mirroring [`column_pass`] on
/// columns. Returns whether any column swap may have reintroduced nonzero
/// entries below the pivot.
fn row_pass(d: &mut IntMatrix, q: &mut IntMatrix, t: usize) -> bool {
    let m = d.cols();
    let mut dirtied = false;
    loop {
        let mut best = t;
        for j in t..m {
            if d[(t, j)].is_zero() {
                continue;
            }
            if d[(t, best)].is_zero() || d[(t, j)].magnitude() < d[(t, best)].magnitude() {
                best = j;
            }
        }
        if best != t {
            d.swap_cols(t, best);
            q.swap_cols(t, best);
            dirtied = true;
        }
        let mut factors: Vec<Option<BigInt>> = vec![None; m];
        let mut any = false;
        for j in t + 1..m {
            if d[(t, j)].is_zero() {
                continue;
            }
            let f = nearest_quotient(&d[(t, j)], &d[(t, t)]);
            if f.is_zero() {
                any = true;
                continue;
            }
            factors[j] = Some(f);
            any = true;
        }
        if !any {
            return dirtied;
        }
        apply_col_factors(d, q, t, &factors);
    }
}

/// `row_i -= factors[i] * row_t` on the trailing columns of `d` and the full
/// width of `p`. Rows update independently, so large blocks run on the rayon
/// pool without changing the result.
fn apply_row_factors(d: &mut IntMatrix, p: &mut IntMatrix, t: usize, factors: &[Option<BigInt>]) {
    let n = d.rows();
    let d_cols = d.cols();
    let pivot_row_d: Vec<BigInt> = d.row(t)[t..].to_vec();
    let pivot_row_p: Vec<BigInt> = p.row(t).to_vec();

    let apply_d = |(i, row): (usize, &mut [BigInt])| {
        if let Some(f) = &factors[i] {
            for (j, pv) in pivot_row_d.iter().enumerate() {
                if !pv.is_zero() {
                    row[t + j] -= f * pv;
                }
            }
        }
    };
    let apply_p = |(i, row): (usize, &mut [BigInt])| {
        if let Some(f) = &factors[i] {
            for (j, pv) in pivot_row_p.iter().enumerate() {
                if !pv.is_zero() {
                    row[j] -= f * pv;
                }
            }
        }
    };
    let p_cols = p.cols();
    if (n - t) * d_cols >= PAR_THRESHOLD {
        d.data.par_chunks_mut(d_cols).enumerate().for_each(apply_d);
        p.data.par_chunks_mut(p_cols).enumerate().for_each(apply_p);
    } else {
        d.data.chunks_mut(d_cols).enumerate().for_each(apply_d);
        p.data.chunks_mut(p_cols).enumerate().for_each(apply_p);
    }
}

/// `col_j -= factors[j] * col_t` on `d` and `q`, organized as one pass per
/// row so rows update independently. Rows of `d` above the pivot are zero in
/// all trailing columns and are skipped; `q` has no such structure and is
/// updated in full.
fn apply_col_factors(d: &mut IntMatrix, q: &mut IntMatrix, t: usize, factors: &[Option<BigInt>]) {
    let n = d.rows();
    let m = d.cols();
    let apply = |factors: &[Option<BigInt>], t_col: usize, row: &mut [BigInt]| {
        let base = row[t_col].clone();
        if base.is_zero() {
            return;
        }
        for (j, f) in factors.iter().enumerate() {
            if let Some(f) = f {
                row[j] -= f * &base;
            }
        }
    };
    let q_cols = q.cols();
    if (n - t) * m >= PAR_THRESHOLD {
        d.data.par_chunks_mut(m).skip(t).for_each(|row| apply(factors, t, row));
        q.data.par_chunks_mut(q_cols).for_each(|row| apply(factors, t, row));
    } else {
        d.data.chunks_mut(m).skip(t).for_each(|row| apply(factors, t, row));
        q.data.chunks_mut(q_cols).for_each(|row| apply(factors, t, row));
    }
}

fn negate_row(d: &mut IntMatrix, p: &mut IntMatrix, t: usize) {
    for v in d.row_mut(t) {
        if !v.is_zero() {
            *v = -v.clone();
        }
    }
    for v in p.row_mut(t) {
        if !v.is_zero() {
            *v = -v.clone();
        }
    }
}

/// Bubbles gcds up the diagonal until each divisor divides the next. Adding
/// column `j` into column `i` places `d_j` below the diagonal, and the
/// ordinary pivot reduction then replaces the pair `(d_i, d_j)` with
/// `(gcd, lcm)`. A fix at one pair can break the previous one, hence the
/// outer loop; the leading divisor strictly shrinks at each fix.
fn enforce_divisor_chain(d: &mut IntMatrix, p: &mut IntMatrix, q: &mut IntMatrix, rank: usize) {
    if rank < 2 {
        return;
    }
    loop {
        let mut changed = false;
        for i in 0..rank - 1 {
            let (di, dj) = (d[(i, i)].clone(), d[(i + 1, i + 1)].clone());
            if (&dj % &di).is_zero() {
                continue;
            }
            for r in 0..d.rows() {
                let add = d[(r, i + 1)].clone();
                d[(r, i)] += add;
            }
            for r in 0..q.rows() {
                let add = q[(r, i + 1)].clone();
                q[(r, i)] += add;
            }
            pivot_reduce(d, p, q, i);
            if d[(i, i)].is_negative() {
                negate_row(d, p, i);
            }
            if d[(i + 1, i + 1)].is_negative() {
                negate_row(d, p, i + 1);
            }
            changed = true;
        }
        if !changed {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlinalg::{det_exact, is_unimodular};
    use num_traits::One;

    fn check(a: &IntMatrix, snf: &SnfResult) {
        assert!(is_unimodular(&snf.p).unwrap(), "P not unimodular");
        assert!(is_unimodular(&snf.q).unwrap(), "Q not unimodular");
        let paq = snf.p.mul(a).unwrap().mul(&snf.q).unwrap();
        assert_eq!(paq, snf.diagonal_matrix(), "P*A*Q is not the diagonal form");
        for d in &snf.divisors {
            assert!(d.is_positive(), "divisor {d} not positive");
        }
    }

    #[test]
    fn single_column_bezout_example() {
        // gcd(4, 6) = 2 realized by the 2x2 Bezout transform.
        let a = IntMatrix::from_rows(&[vec![4], vec![6]]);
        let snf = smith_normal_form(&a);
        assert_eq!(snf.divisors, vec![BigInt::from(2)]);
        assert_eq!(snf.rank(), 1);
        check(&a, &snf);
    }

    #[test]
    fn diagonal_input_is_fixed_point() {
        let a = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        let snf = smith_normal_form(&a);
        assert_eq!(snf.rank(), 2);
        let product: BigInt = snf.divisors.iter().product();
        assert_eq!(product, BigInt::from(6));
        check(&a, &snf);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let a = IntMatrix::zeros(3, 2);
        let snf = smith_normal_form(&a);
        assert!(snf.divisors.is_empty());
        assert_eq!(snf.p, IntMatrix::identity(3));
        assert_eq!(snf.q, IntMatrix::identity(2));
    }

    #[test]
    fn identity_slices() {
        let a = IntMatrix::identity(2);
        let snf = smith_normal_form(&a);
        assert_eq!(snf.rank(), 2);
        assert!(snf.p_0().rows() == 0);
        check(&a, &snf);
    }

    #[test]
    fn rectangular_wide_and_tall() {
        let wide = IntMatrix::from_rows(&[vec![2, 4, 4]]);
        let snf = smith_normal_form(&wide);
        assert_eq!(snf.divisors, vec![BigInt::from(2)]);
        check(&wide, &snf);

        let tall = IntMatrix::from_rows(&[vec![1, 0], vec![3, 6], vec![2, 4]]);
        let snf = smith_normal_form(&tall);
        assert_eq!(snf.rank(), 2);
        check(&tall, &snf);
    }

    #[test]
    fn divisor_chain_option() {
        let a = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        let snf = smith_normal_form_with(&a, SnfOptions { divisor_chain: true });
        assert_eq!(snf.divisors, vec![BigInt::one(), BigInt::from(6)]);
        check(&a, &snf);

        let b = IntMatrix::from_rows(&[vec![6, 0, 0], vec![0, 10, 0], vec![0, 0, 15]]);
        let snf = smith_normal_form_with(&b, SnfOptions { divisor_chain: true });
        assert_eq!(
            snf.divisors,
            vec![BigInt::one(), BigInt::from(30), BigInt::from(30)]
        );
        check(&b, &snf);
    }

    #[test]
    fn random_reconstruction() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let n = rng.gen_range(1..=6);
            let m = rng.gen_range(1..=6);
            let rows: Vec<Vec<i64>> = (0..n)
                .map(|_| (0..m).map(|_| rng.gen_range(-9..=9)).collect())
                .collect();
            let a = IntMatrix::from_rows(&rows);
            let snf = smith_normal_form(&a);
            check(&a, &snf);
            if a.is_square() {
                let det = det_exact(&a).unwrap();
                let prod: BigInt = snf.divisors.iter().product();
                assert_eq!(det.abs(), if snf.rank() == a.rows() { prod } else { BigInt::zero() });
            }
        }
    }

}
