//! Small numeric helpers shared across modules: complex powers with large
//! integer exponents, roots of unity, exact rational powers and a cheap
//! stateless seed mixer.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::f64::consts::PI;

/// Exponent magnitude above which complex powers switch to log-polar form.
/// Repeated multiplication keeps full precision for small exponents; for
/// large ones the accumulated rounding of the product loop exceeds the error
/// of `exp`/`ln`.
const POW_LOOP_LIMIT: i64 = 16;

/// `z^e` for a nonzero complex number and an arbitrary integer exponent.
pub fn complex_pow(z: Complex64, e: &BigInt) -> Complex64 {
    match e.to_i64() {
        Some(k) if k.abs() <= POW_LOOP_LIMIT => complex_pow_i64(z, k),
        _ => complex_pow_polar(z, e.to_f64().unwrap_or(f64::INFINITY)),
    }
}

/// `z^e` for a machine-word exponent.
pub fn complex_pow_i64(z: Complex64, e: i64) -> Complex64 {
    if e.abs() <= POW_LOOP_LIMIT {
        let mut acc = Complex64::one();
        for _ in 0..e.unsigned_abs() {
            acc *= z;
        }
        if e < 0 {
            acc = acc.inv();
        }
        acc
    } else {
        complex_pow_polar(z, e as f64)
    }
}

fn complex_pow_polar(z: Complex64, e: f64) -> Complex64 {
    let rho = z.norm();
    let theta = z.arg();
    let magnitude = (e * rho.ln()).exp();
    let angle = (e * theta).rem_euclid(2.0 * PI);
    Complex64::from_polar(magnitude, angle)
}

/// Principal `d`-th root: modulus `|w|^{1/d}`, argument `arg(w)/d` with
/// `arg(w)` taken in `(-pi, pi]`, so the result's argument lies in
/// `(-pi/d, pi/d]`.
pub fn principal_root(w: Complex64, d: u64) -> Complex64 {
    assert!(d > 0, "root order must be positive");
    let mut theta = w.arg();
    if theta == -PI {
        theta = PI;
    }
    Complex64::from_polar(w.norm().powf(1.0 / d as f64), theta / d as f64)
}

/// `e^{2 pi i k / d}`.
pub fn root_of_unity(k: u64, d: u64) -> Complex64 {
    assert!(d > 0, "root order must be positive");
    let angle = 2.0 * PI * (k % d) as f64 / d as f64;
    Complex64::from_polar(1.0, angle)
}

/// Exact `b^e` for a nonzero rational base and arbitrary integer exponent.
pub fn rational_pow(b: &BigRational, e: &BigInt) -> BigRational {
    assert!(!b.is_zero(), "zero base with integer exponent");
    if b.is_one() {
        return BigRational::one();
    }
    let mut base = if e.is_negative() { b.recip() } else { b.clone() };
    let mut exp = e.abs().into_parts().1;
    let mut acc = BigRational::one();
    while !exp.is_zero() {
        if exp.bit(0) {
            acc *= &base;
        }
        exp >>= 1;
        if !exp.is_zero() {
            base = &base * &base;
        }
    }
    acc
}

/// Natural logarithm of a positive big integer, accurate to double precision
/// regardless of magnitude.
pub fn big_ln(x: &num_bigint::BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 63 {
        return (x.to_u64().expect("fits in 63 bits") as f64).ln();
    }
    let top = (x >> (bits - 63)).to_u64().expect("shifted to 63 bits");
    (top as f64).ln() + (bits - 63) as f64 * std::f64::consts::LN_2
}

/// `ln |w|` for a nonzero rational, stable far outside the double range.
pub fn rational_ln_abs(w: &BigRational) -> f64 {
    assert!(!w.is_zero(), "log of zero");
    big_ln(w.numer().magnitude()) - big_ln(w.denom().magnitude())
}

/// Lossy conversion that saturates to infinity instead of failing on values
/// outside the double range.
pub fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(if x.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

/// Lossy conversion of a rational to a double. Falls back to log-space when
/// numerator and denominator individually overflow, so ratios of huge values
/// still convert to their true magnitude.
pub fn rational_to_f64(w: &BigRational) -> f64 {
    if w.is_zero() {
        return 0.0;
    }
    match w.to_f64() {
        Some(v) if v.is_finite() && v != 0.0 => v,
        _ => {
            let mag = rational_ln_abs(w).exp();
            if w.is_negative() {
                -mag
            } else {
                mag
            }
        }
    }
}

/// One step of the splitmix64 sequence; used to derive independent stream
/// seeds from a user-supplied one.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    #[test]
    fn small_powers_match_direct_products() {
        let z = Complex64::new(1.25, -0.5);
        assert!((complex_pow_i64(z, 3) - z * z * z).norm() < 1e-12);
        assert!((complex_pow_i64(z, -2) - (z * z).inv()).norm() < 1e-12);
        assert_eq!(complex_pow_i64(z, 0), Complex64::one());
    }

    #[test]
    fn large_powers_stay_accurate_on_the_unit_circle() {
        let z = Complex64::from_polar(1.0, 0.7);
        let e = BigInt::from(1_000_003i64);
        let w = complex_pow(z, &e);
        assert!((w.norm() - 1.0).abs() < 1e-9);
        let expected = (0.7f64 * 1_000_003.0).rem_euclid(2.0 * PI);
        assert!((w.arg().rem_euclid(2.0 * PI) - expected).abs() < 1e-6);
    }

    #[test]
    fn principal_root_argument_range() {
        let w = Complex64::new(-1.0, 0.0);
        let r = principal_root(w, 2);
        assert!((r - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        for d in 1..6u64 {
            let r = principal_root(Complex64::new(0.3, -0.4), d);
            assert!(r.arg() > -PI / d as f64 - 1e-12);
            assert!(r.arg() <= PI / d as f64 + 1e-12);
        }
    }

    #[test]
    fn roots_of_unity_multiply_to_one() {
        for d in 1..8u64 {
            for k in 0..d {
                let mut acc = Complex64::one();
                for _ in 0..d {
                    acc *= root_of_unity(k, d);
                }
                assert!((acc - Complex64::one()).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn rational_powers_are_exact() {
        let b = BigRational::from_f64(1.5).unwrap();
        let p = rational_pow(&b, &BigInt::from(10));
        assert_eq!(p, BigRational::new(BigInt::from(59049), BigInt::from(1024)));
        let n = rational_pow(&b, &BigInt::from(-2));
        assert_eq!(n, BigRational::new(BigInt::from(4), BigInt::from(9)));
    }

    #[test]
    fn logs_survive_huge_magnitudes() {
        let big = BigInt::from(10u32).pow(40);
        let expected = 40.0 * 10f64.ln();
        assert!((big_ln(big.magnitude()) - expected).abs() / expected < 1e-12);

        let huge = BigInt::from(10u32).pow(400);
        let ratio = BigRational::new(huge.clone(), huge * 3);
        let v = rational_to_f64(&ratio);
        assert!((v - 1.0 / 3.0).abs() < 1e-9);

        let towering: BigInt = BigInt::one() << 4096;
        assert_eq!(big_to_f64(&towering), f64::INFINITY);
        assert_eq!(big_to_f64(&(-towering)), f64::NEG_INFINITY);
    }
}
