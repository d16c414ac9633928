//! Exact rational scalars.
//!
//! Backed by `num`'s arbitrary-precision `BigRational`, which keeps every
//! value in lowest terms with a positive denominator.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, One, Signed, Zero};

pub type Rational = num::BigRational;

/// A point (or coefficient vector) in `ℚ^n`.
pub type Point = Vec<Rational>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError(pub String);

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational literal {:?}", self.0)
    }
}

impl std::error::Error for ParseRationalError {}

/// Parses `"p"` or `"p/q"` with optional leading minus on `p`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let int = |part: &str| -> Result<BigInt, ParseRationalError> {
        let digits = part.strip_prefix('-').unwrap_or(part);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        BigInt::from_str(part).map_err(|_| err())
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(int(s)?)),
        Some((n, d)) => {
            if d.starts_with('-') {
                return Err(err());
            }
            let d = int(d)?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(int(n)?, d))
        }
    }
}

/// Normalized text form: `"p"` for integers, `"p/q"` otherwise.
pub fn render_rational(r: &Rational) -> String {
    r.to_string()
}

/// `(a, b, c)` display form for diagnostics.
pub fn render_point(p: &[Rational]) -> String {
    let parts: Vec<String> = p.iter().map(render_rational).collect();
    format!("({})", parts.join(", "))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn point(values: &[i64]) -> Point {
    values.iter().map(|&v| int(v)).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Scales `v` by a positive factor so that its entries are coprime integers.
/// The zero vector is returned unchanged.
pub fn primitive(v: &[Rational]) -> Vec<Rational> {
    let mut lcm = BigInt::one();
    for x in v {
        lcm = num::integer::lcm(lcm, x.denom().clone());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let gcd = ints
        .iter()
        .fold(BigInt::zero(), |g, x| num::integer::gcd(g, x.abs()));
    if gcd.is_zero() {
        return v.to_vec();
    }
    ints.into_iter()
        .map(|x| Rational::from_integer(x / &gcd))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_integer_and_fraction_forms() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("-7/2").unwrap(), frac(-7, 2));
        assert_eq!(parse_rational("4/6").unwrap(), frac(2, 3));
        assert_eq!(parse_rational("-0").unwrap(), int(0));
    }

    #[test]
    fn rejects_malformed_literals() {
        for bad in ["", "1/0", "1/-2", "a", "1.5", "--1", "1/", "/2", " 1", "+1"] {
            assert!(parse_rational(bad).is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn renders_normalized() {
        assert_eq!(render_rational(&frac(6, -4)), "-3/2");
        assert_eq!(render_rational(&frac(8, 4)), "2");
    }

    #[test]
    fn primitive_keeps_direction() {
        assert_eq!(primitive(&[frac(1, 2), frac(-3, 4)]), point(&[2, -3]));
        assert_eq!(primitive(&[int(0), int(0)]), point(&[0, 0]));
    }

    proptest! {
        #[test]
        fn parse_inverts_render(n in -1_000_000i64..1_000_000, d in 1i64..1_000_000) {
            let r = frac(n, d);
            prop_assert_eq!(parse_rational(&render_rational(&r)).unwrap(), r);
        }
    }
}
