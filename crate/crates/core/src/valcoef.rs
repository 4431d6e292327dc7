//! Truncated coefficients over a non-archimedean valued field.
//!
//! A coefficient is a finite formal sum of rational powers of the
//! uniformizer t with rational scalars: sum of c_g * t^g. The valuation is
//! the least exponent present, the residue lead its scalar. Arithmetic is
//! exact; cancellation removes zero terms so the valuation is always
//! honest.

use crate::error::{Error, Result};
use crate::rat::{fmt_q, parse_q, Val, Q};
use num_traits::{One, Zero};
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

/// Finite sum of scalar multiples of t^exponent, exponents rational.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct ValuedCoefficient {
    terms: BTreeMap<Q, Q>,
}

impl ValuedCoefficient {
    pub fn zero() -> Self {
        ValuedCoefficient::default()
    }

    pub fn one() -> Self {
        Self::term(Q::zero(), Q::one())
    }

    /// The single term c * t^g; zero scalars give the zero coefficient.
    pub fn term(exponent: Q, scalar: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !scalar.is_zero() {
            terms.insert(exponent, scalar);
        }
        ValuedCoefficient { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Q, Q)>>(pairs: I) -> Self {
        let mut out = ValuedCoefficient::zero();
        for (g, c) in pairs {
            out.add_term(g, c);
        }
        out
    }

    fn add_term(&mut self, exponent: Q, scalar: Q) {
        if scalar.is_zero() {
            return;
        }
        match self.terms.get_mut(&exponent) {
            Some(existing) => {
                *existing += scalar;
                if existing.is_zero() {
                    self.terms.remove(&exponent);
                }
            }
            None => {
                self.terms.insert(exponent, scalar);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Q, &Q)> {
        self.terms.iter()
    }

    /// Least exponent present; infinity for the zero coefficient.
    pub fn valuation(&self) -> Val {
        match self.terms.keys().next() {
            Some(g) => Val::Finite(g.clone()),
            None => Val::Infinity,
        }
    }

    /// Scalar of the least-exponent term.
    pub fn residue_lead(&self) -> Result<Q> {
        self.terms
            .values()
            .next()
            .cloned()
            .ok_or(Error::ZeroResidue)
    }
}

impl Add for &ValuedCoefficient {
    type Output = ValuedCoefficient;
    fn add(self, rhs: &ValuedCoefficient) -> ValuedCoefficient {
        let mut out = self.clone();
        for (g, c) in &rhs.terms {
            out.add_term(g.clone(), c.clone());
        }
        out
    }
}

impl Sub for &ValuedCoefficient {
    type Output = ValuedCoefficient;
    fn sub(self, rhs: &ValuedCoefficient) -> ValuedCoefficient {
        self + &(-rhs)
    }
}

impl Neg for &ValuedCoefficient {
    type Output = ValuedCoefficient;
    fn neg(self) -> ValuedCoefficient {
        ValuedCoefficient {
            terms: self
                .terms
                .iter()
                .map(|(g, c)| (g.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl Mul for &ValuedCoefficient {
    type Output = ValuedCoefficient;
    fn mul(self, rhs: &ValuedCoefficient) -> ValuedCoefficient {
        let mut out = ValuedCoefficient::zero();
        for (g1, c1) in &self.terms {
            for (g2, c2) in &rhs.terms {
                out.add_term(g1 + g2, c1 * c2);
            }
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct TermDto {
    exp: String,
    coef: String,
}

impl Serialize for ValuedCoefficient {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let dtos: Vec<TermDto> = self
            .terms
            .iter()
            .map(|(g, c)| TermDto {
                exp: fmt_q(g),
                coef: fmt_q(c),
            })
            .collect();
        dtos.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ValuedCoefficient {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let dtos = Vec::<TermDto>::deserialize(d)?;
        let mut out = ValuedCoefficient::zero();
        for t in dtos {
            let g = parse_q(&t.exp).map_err(|e| D::Error::custom(e.to_string()))?;
            let c = parse_q(&t.coef).map_err(|e| D::Error::custom(e.to_string()))?;
            out.add_term(g, c);
        }
        Ok(out)
    }
}
