//! JSON encoding of binomial systems.
//!
//! The document is `{"n": <vars>, "equations": [...]}` with every equation in
//! one of two shapes: a solved form `{"exponents": [..], "rhs": ..}` giving
//! `x^e = rhs` directly, or a raw two-term form `{"c1": .., "alpha": [..],
//! "c2": .., "beta": [..]}` for `c1 * x^alpha + c2 * x^beta = 0`. Complex
//! numbers are written `{"re": .., "im": ..}`; a bare number means a real
//! value. The solved form also accepts `"rhs_rational": "p/q"`, and a system
//! whose equations all carry rational right-hand sides is analyzed exactly.

use super::{BinomialError, BinomialSystem};
use crate::intlinalg::IntMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

#[derive(Serialize, Deserialize)]
struct ComplexRepr {
    re: f64,
    im: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumberRepr {
    Real(f64),
    Complex(ComplexRepr),
}

impl NumberRepr {
    fn value(&self) -> Complex64 {
        match self {
            NumberRepr::Real(v) => Complex64::new(*v, 0.0),
            NumberRepr::Complex(c) => Complex64::new(c.re, c.im),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum EquationRepr {
    Solved {
        exponents: Vec<i64>,
        rhs: Option<NumberRepr>,
        rhs_rational: Option<String>,
    },
    Raw {
        c1: NumberRepr,
        alpha: Vec<i64>,
        c2: NumberRepr,
        beta: Vec<i64>,
    },
}

#[derive(Deserialize)]
struct SystemRepr {
    n: usize,
    equations: Vec<EquationRepr>,
}

pub fn parse(text: &str) -> Result<BinomialSystem, BinomialError> {
    let doc: SystemRepr =
        serde_json::from_str(text).map_err(|e| BinomialError::Parse(e.to_string()))?;
    let n = doc.n;
    let m = doc.equations.len();
    let mut exponents = IntMatrix::zeros(n, m);
    let mut rhs = Vec::with_capacity(m);
    let mut rational = Vec::with_capacity(m);

    for (index, eq) in doc.equations.iter().enumerate() {
        let check_arity = |v: &[i64]| {
            if v.len() == n {
                Ok(())
            } else {
                Err(BinomialError::ExponentArity {
                    index,
                    expected: n,
                    found: v.len(),
                })
            }
        };
        match eq {
            EquationRepr::Solved {
                exponents: e,
                rhs: value,
                rhs_rational,
            } => {
                check_arity(e)?;
                for (i, &v) in e.iter().enumerate() {
                    exponents[(i, index)] = BigInt::from(v);
                }
                let exact = rhs_rational
                    .as_ref()
                    .map(|s| {
                        BigRational::from_str(s).map_err(|e| {
                            BinomialError::Parse(format!(
                                "equation {index}: bad rational \"{s}\": {e}"
                            ))
                        })
                    })
                    .transpose()?;
                match (&exact, value) {
                    (Some(_), _) => {}
                    (None, Some(v)) => rhs.push(v.value()),
                    (None, None) => {
                        return Err(BinomialError::Parse(format!(
                            "equation {index}: needs rhs or rhs_rational"
                        )))
                    }
                }
                rational.push(exact);
            }
            EquationRepr::Raw {
                c1,
                alpha,
                c2,
                beta,
            } => {
                check_arity(alpha)?;
                check_arity(beta)?;
                for i in 0..n {
                    exponents[(i, index)] = BigInt::from(alpha[i] - beta[i]);
                }
                let c1 = c1.value();
                if c1.norm() == 0.0 {
                    return Err(BinomialError::ZeroCoefficient { index });
                }
                rhs.push(-c2.value() / c1);
                rational.push(None);
            }
        }
    }

    if rational.iter().all(Option::is_some) && m > 0 {
        let exact: Vec<BigRational> = rational.into_iter().map(Option::unwrap).collect();
        BinomialSystem::from_exact_parts(exponents, exact)
    } else if rational.iter().any(Option::is_some) {
        Err(BinomialError::Parse(
            "rhs_rational must be given for every equation or for none".into(),
        ))
    } else {
        BinomialSystem::from_parts(exponents, rhs)
    }
}

#[derive(Serialize)]
struct EquationOut {
    exponents: Vec<i64>,
    rhs: ComplexRepr,
    #[serde(skip_serializing_if = "Option::is_none")]
    rhs_rational: Option<String>,
}

#[derive(Serialize)]
struct SystemOut {
    n: usize,
    equations: Vec<EquationOut>,
}

pub fn render(sys: &BinomialSystem) -> Result<String, BinomialError> {
    let n = sys.num_vars();
    let mut equations = Vec::with_capacity(sys.num_equations());
    for j in 0..sys.num_equations() {
        let mut exponents = Vec::with_capacity(n);
        for i in 0..n {
            let e = sys.exponents()[(i, j)].to_i64().ok_or_else(|| {
                BinomialError::Parse(format!(
                    "equation {j}: exponent exceeds the JSON integer range"
                ))
            })?;
            exponents.push(e);
        }
        let b = sys.rhs()[j];
        equations.push(EquationOut {
            exponents,
            rhs: ComplexRepr { re: b.re, im: b.im },
            rhs_rational: sys.exact_rhs().map(|r| r[j].to_string()),
        });
    }
    let doc = SystemOut { n, equations };
    serde_json::to_string_pretty(&doc).map_err(|e| BinomialError::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn solved_form_round_trips() {
        let text = r#"{
            "n": 2,
            "equations": [
                {"exponents": [2, 0], "rhs_rational": "4"},
                {"exponents": [0, 3], "rhs_rational": "27/8"}
            ]
        }"#;
        let sys = BinomialSystem::from_json(text).unwrap();
        assert_eq!(sys.num_vars(), 2);
        assert_eq!(sys.num_equations(), 2);
        assert_eq!(sys.exponents()[(0, 0)], BigInt::from(2));
        assert_eq!(sys.exponents()[(1, 1)], BigInt::from(3));
        let exact = sys.exact_rhs().unwrap();
        assert_eq!(exact[1], BigRational::new(BigInt::from(27), BigInt::from(8)));

        let again = BinomialSystem::from_json(&sys.to_json().unwrap()).unwrap();
        assert_eq!(again.exponents(), sys.exponents());
        assert_eq!(again.exact_rhs().unwrap(), exact);
    }

    #[test]
    fn raw_form_reduces_to_a_power_equation() {
        let text = r#"{
            "n": 2,
            "equations": [
                {"c1": 1.0, "alpha": [1, 0], "c2": -2.0, "beta": [0, 1]}
            ]
        }"#;
        let sys = BinomialSystem::from_json(text).unwrap();
        assert_eq!(sys.exponents()[(0, 0)], BigInt::one());
        assert_eq!(sys.exponents()[(1, 0)], BigInt::from(-1));
        assert!((sys.rhs()[0] - Complex64::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn complex_rhs_and_errors() {
        let text = r#"{
            "n": 1,
            "equations": [{"exponents": [1], "rhs": {"re": 0.0, "im": 1.0}}]
        }"#;
        let sys = BinomialSystem::from_json(text).unwrap();
        assert!((sys.rhs()[0] - Complex64::new(0.0, 1.0)).norm() < 1e-15);

        let bad_arity = r#"{"n": 2, "equations": [{"exponents": [1], "rhs": 1.0}]}"#;
        assert!(matches!(
            BinomialSystem::from_json(bad_arity),
            Err(BinomialError::ExponentArity { expected: 2, found: 1, .. })
        ));

        let zero_c1 = r#"{
            "n": 1,
            "equations": [{"c1": 0.0, "alpha": [1], "c2": 1.0, "beta": [0]}]
        }"#;
        assert!(matches!(
            BinomialSystem::from_json(zero_c1),
            Err(BinomialError::ZeroCoefficient { index: 0 })
        ));

        let mixed = r#"{
            "n": 1,
            "equations": [
                {"exponents": [1], "rhs_rational": "2"},
                {"exponents": [2], "rhs": 4.0}
            ]
        }"#;
        assert!(matches!(
            BinomialSystem::from_json(mixed),
            Err(BinomialError::Parse(_))
        ));
    }
}
