use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::Add;

/// Exact rational scalar used throughout the engine.
pub type Q = num_rational::BigRational;

/// Rational from an integer.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Rational n/d. Panics on d = 0.
pub fn qq(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses "p" or "p/q" with optional leading sign; the result is reduced.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::InvalidInput("empty rational literal".into()));
    }
    match s.split_once('/') {
        None => {
            let n: BigInt = s
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad integer literal {s:?}")))?;
            Ok(Q::from_integer(n))
        }
        Some((p, q)) => {
            let n: BigInt = p
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad numerator in {s:?}")))?;
            let d: BigInt = q
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad denominator in {s:?}")))?;
            if d.is_zero() {
                return Err(Error::InvalidInput(format!("zero denominator in {s:?}")));
            }
            Ok(Q::new(n, d))
        }
    }
}

/// Canonical text form: "p" for integers, "p/q" otherwise, q > 0.
pub fn fmt_q(q: &Q) -> String {
    q.to_string()
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Q::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

pub fn dot_int(a: &[Q], u: &[i64]) -> Q {
    debug_assert_eq!(a.len(), u.len());
    let mut acc = Q::zero();
    for (x, n) in a.iter().zip(u) {
        if *n != 0 {
            acc += x * qi(*n);
        }
    }
    acc
}

pub fn qvec(ints: &[i64]) -> Vec<Q> {
    ints.iter().map(|&n| qi(n)).collect()
}

/// Value of a valuation: a rational or positive infinity (the value on 0).
///
/// Ordering puts `Infinity` above every finite value; addition is the value
/// of a product, so anything plus `Infinity` is `Infinity`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Val {
    Finite(Q),
    Infinity,
}

impl Val {
    pub fn finite(&self) -> Option<&Q> {
        match self {
            Val::Finite(q) => Some(q),
            Val::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Val::Infinity)
    }
}

impl Add for Val {
    type Output = Val;
    fn add(self, rhs: Val) -> Val {
        match (self, rhs) {
            (Val::Finite(a), Val::Finite(b)) => Val::Finite(a + b),
            _ => Val::Infinity,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Finite(q) => write!(f, "{q}"),
            Val::Infinity => write!(f, "inf"),
        }
    }
}

/// Rounds toward nearest with ties away from zero, to `digits` decimals,
/// and prints the fixed-point result. Used only at rendering boundaries.
pub fn fmt_q_fixed(q: &Q, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = q * Q::from_integer(scale.clone());
    let num = scaled.numer();
    let den = scaled.denom();
    let twice = BigInt::from(2) * num;
    let rounded: BigInt = if num.is_negative() {
        -((-twice + den) / (BigInt::from(2) * den))
    } else {
        (twice + den) / (BigInt::from(2) * den)
    };
    let neg = rounded.is_negative();
    let abs = rounded.abs();
    let int_part = &abs / &scale;
    let frac_part = &abs % &scale;
    let frac_str = format!("{:0>width$}", frac_part, width = digits as usize);
    let sign = if neg && (!int_part.is_zero() || !frac_part.is_zero()) {
        "-"
    } else {
        ""
    };
    format!("{sign}{int_part}.{frac_str}")
}

/// Sum of 1 as a sanity anchor for tests needing a nonzero rational.
pub fn one() -> Q {
    Q::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_roundtrip() {
        for s in ["0", "5", "-3", "1/2", "-7/3", "10/4"] {
            let q = parse_q(s).unwrap();
            let back = parse_q(&fmt_q(&q)).unwrap();
            assert_eq!(q, back);
        }
        assert_eq!(fmt_q(&parse_q("10/4").unwrap()), "5/2");
        assert_eq!(fmt_q(&parse_q("-4/2").unwrap()), "-2");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
        assert!(parse_q("").is_err());
    }

    #[test]
    fn val_ordering_and_addition() {
        let a = Val::Finite(qi(2));
        let b = Val::Finite(qq(5, 2));
        assert!(a < b);
        assert!(b < Val::Infinity);
        assert_eq!(a.clone() + b, Val::Finite(qq(9, 2)));
        assert_eq!(a + Val::Infinity, Val::Infinity);
        assert_eq!(Val::Infinity + Val::Infinity, Val::Infinity);
    }

    #[test]
    fn dot_products() {
        assert_eq!(dot(&qvec(&[1, 2]), &qvec(&[3, 4])), qi(11));
        assert_eq!(dot_int(&[qq(1, 2), qq(1, 3)], &[2, 3]), qi(2));
        assert_eq!(dot(&[], &[]), qi(0));
    }

    #[test]
    fn fixed_point_formatting() {
        assert_eq!(fmt_q_fixed(&qq(1, 3), 6), "0.333333");
        assert_eq!(fmt_q_fixed(&qq(-1, 3), 6), "-0.333333");
        assert_eq!(fmt_q_fixed(&qq(1, 2), 6), "0.500000");
        assert_eq!(fmt_q_fixed(&qi(2), 6), "2.000000");
        assert_eq!(fmt_q_fixed(&qq(2, 3), 2), "0.67");
        assert_eq!(fmt_q_fixed(&qq(-1, 2000000), 6), "-0.000001");
        assert_eq!(fmt_q_fixed(&qq(1, 20000000), 6), "0.000000");
    }
}
