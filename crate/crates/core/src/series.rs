//! Multivariate series specifications and window truncation.
//!
//! A spec describes a (possibly infinite) formal series in r variables
//! either by an explicit finite term list or by a support rule: a product
//! of per-coordinate integer ranges together with a polynomial valuation
//! rule g, the term at exponent u being t^{g(u)}. Truncation to a finite
//! window produces a Laurent polynomial with exact valued coefficients.

use crate::error::{Error, Result};
use crate::rat::{fmt_q, parse_q, Q};
use crate::valcoef::ValuedCoefficient;
use crate::Val;
use num_traits::Zero;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;

/// Finite product of integer intervals, one per coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntBox {
    intervals: Vec<(i64, i64)>,
}

impl IntBox {
    pub fn new(intervals: Vec<(i64, i64)>) -> Result<Self> {
        for &(lo, hi) in &intervals {
            if lo > hi {
                return Err(Error::InvalidInput(format!(
                    "empty interval [{lo}, {hi}] in box"
                )));
            }
        }
        Ok(IntBox { intervals })
    }

    /// The cube [0, s]^rank.
    pub fn cube(rank: usize, s: i64) -> Result<Self> {
        IntBox::new(vec![(0, s); rank])
    }

    pub fn rank(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[(i64, i64)] {
        &self.intervals
    }

    pub fn contains(&self, u: &[i64]) -> bool {
        u.len() == self.intervals.len()
            && u.iter()
                .zip(&self.intervals)
                .all(|(&x, &(lo, hi))| lo <= x && x <= hi)
    }

    /// Componentwise containment in another box.
    pub fn subset_of(&self, other: &IntBox) -> bool {
        self.intervals.len() == other.intervals.len()
            && self
                .intervals
                .iter()
                .zip(&other.intervals)
                .all(|(&(a, b), &(c, d))| c <= a && b <= d)
    }

    /// All lattice points, in lexicographic order.
    pub fn lattice_points(&self) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for &(lo, hi) in &self.intervals {
            let mut next = Vec::with_capacity(out.len() * ((hi - lo) as usize + 1));
            for prefix in &out {
                for x in lo..=hi {
                    let mut p = prefix.clone();
                    p.push(x);
                    next.push(p);
                }
            }
            out = next;
        }
        out
    }
}

/// Per-coordinate exponent range; `hi: None` means unbounded above.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordRange {
    pub lo: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<i64>,
}

impl CoordRange {
    fn contains(&self, x: i64) -> bool {
        x >= self.lo && self.hi.map_or(true, |h| x <= h)
    }
}

/// Polynomial in the exponent coordinates with rational scalars, used as a
/// valuation rule u -> g(u).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentPoly {
    /// (powers per coordinate, scalar), sorted by powers, scalars nonzero.
    terms: Vec<(Vec<u32>, Q)>,
}

impl ExponentPoly {
    pub fn new(rank: usize, terms: Vec<(Vec<u32>, Q)>) -> Result<Self> {
        let mut merged: BTreeMap<Vec<u32>, Q> = BTreeMap::new();
        for (pows, c) in terms {
            if pows.len() != rank {
                return Err(Error::InvalidInput(
                    "exponent polynomial arity does not match rank".into(),
                ));
            }
            *merged.entry(pows).or_insert_with(Q::zero) += c;
        }
        merged.retain(|_, c| !c.is_zero());
        Ok(ExponentPoly {
            terms: merged.into_iter().collect(),
        })
    }

    pub fn terms(&self) -> &[(Vec<u32>, Q)] {
        &self.terms
    }

    pub fn eval(&self, u: &[i64]) -> Q {
        let mut acc = Q::zero();
        for (pows, c) in &self.terms {
            let mut m = c.clone();
            for (&x, &p) in u.iter().zip(pows) {
                for _ in 0..p {
                    m *= Q::from_integer(x.into());
                }
            }
            acc += m;
        }
        acc
    }

    /// Largest total degree among terms; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(p, _)| p.iter().sum())
            .max()
            .unwrap_or(0)
    }

    /// Terms of exact total degree d.
    pub fn homogeneous_part(&self, d: u32) -> Vec<(Vec<u32>, Q)> {
        self.terms
            .iter()
            .filter(|(p, _)| p.iter().sum::<u32>() == d)
            .cloned()
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct ExponentTermDto {
    exps: Vec<u32>,
    coef: String,
}

impl Serialize for ExponentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let dtos: Vec<ExponentTermDto> = self
            .terms
            .iter()
            .map(|(p, c)| ExponentTermDto {
                exps: p.clone(),
                coef: fmt_q(c),
            })
            .collect();
        dtos.serialize(s)
    }
}

/// Support rule: exponents range over a product of `CoordRange`s, the term
/// at u is t^{valuation(u)} (residue scalar 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportRule {
    pub ranges: Vec<CoordRange>,
    pub valuation: ExponentPoly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeriesSupport {
    Explicit(BTreeMap<Vec<i64>, ValuedCoefficient>),
    Rule(SupportRule),
}

/// A series in r variables, given explicitly or by rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesSpec {
    rank: usize,
    support: SeriesSupport,
}

impl SeriesSpec {
    pub fn explicit(rank: usize, terms: Vec<(Vec<i64>, ValuedCoefficient)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (u, c) in terms {
            if u.len() != rank {
                return Err(Error::InvalidInput(
                    "term exponent arity does not match rank".into(),
                ));
            }
            if c.is_zero() {
                continue;
            }
            if map.insert(u.clone(), c).is_some() {
                return Err(Error::InvalidInput(format!("duplicate exponent {u:?}")));
            }
        }
        Ok(SeriesSpec {
            rank,
            support: SeriesSupport::Explicit(map),
        })
    }

    pub fn rule(rank: usize, ranges: Vec<CoordRange>, valuation: ExponentPoly) -> Result<Self> {
        if ranges.len() != rank {
            return Err(Error::InvalidInput(
                "number of ranges does not match rank".into(),
            ));
        }
        for r in &ranges {
            if let Some(hi) = r.hi {
                if hi < r.lo {
                    return Err(Error::InvalidInput(format!("empty range [{}, {hi}]", r.lo)));
                }
            }
        }
        if valuation.terms.iter().any(|(p, _)| p.len() != rank) {
            return Err(Error::InvalidInput(
                "valuation rule arity does not match rank".into(),
            ));
        }
        Ok(SeriesSpec {
            rank,
            support: SeriesSupport::Rule(SupportRule { ranges, valuation }),
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn support(&self) -> &SeriesSupport {
        &self.support
    }

    /// Whether only finitely many exponents carry a term.
    pub fn has_finite_support(&self) -> bool {
        match &self.support {
            SeriesSupport::Explicit(_) => true,
            SeriesSupport::Rule(r) => r.ranges.iter().all(|c| c.hi.is_some()),
        }
    }

    /// Smallest box containing the whole support, when finite.
    pub fn support_box(&self) -> Option<IntBox> {
        match &self.support {
            SeriesSupport::Explicit(map) => {
                let first = map.keys().next()?;
                let mut intervals: Vec<(i64, i64)> = first.iter().map(|&x| (x, x)).collect();
                for u in map.keys() {
                    for (i, &x) in u.iter().enumerate() {
                        intervals[i].0 = intervals[i].0.min(x);
                        intervals[i].1 = intervals[i].1.max(x);
                    }
                }
                Some(IntBox { intervals })
            }
            SeriesSupport::Rule(r) => {
                let intervals = r
                    .ranges
                    .iter()
                    .map(|c| c.hi.map(|h| (c.lo, h)))
                    .collect::<Option<Vec<_>>>()?;
                Some(IntBox { intervals })
            }
        }
    }

    /// Valuation of the coefficient at exponent u; infinity off support.
    pub fn valuation_at(&self, u: &[i64]) -> Val {
        if u.len() != self.rank {
            return Val::Infinity;
        }
        match &self.support {
            SeriesSupport::Explicit(map) => match map.get(u) {
                Some(c) => c.valuation(),
                None => Val::Infinity,
            },
            SeriesSupport::Rule(r) => {
                if u.iter().zip(&r.ranges).all(|(&x, cr)| cr.contains(x)) {
                    Val::Finite(r.valuation.eval(u))
                } else {
                    Val::Infinity
                }
            }
        }
    }

    /// Restriction to the window: terms with exponent inside the box. The
    /// result may be the zero polynomial if the window misses the support.
    pub fn truncate(&self, window: &IntBox) -> Result<LaurentPolynomial> {
        if window.rank() != self.rank {
            return Err(Error::InvalidInput(
                "window rank does not match series rank".into(),
            ));
        }
        let mut terms = BTreeMap::new();
        match &self.support {
            SeriesSupport::Explicit(map) => {
                for (u, c) in map {
                    if window.contains(u) {
                        terms.insert(u.clone(), c.clone());
                    }
                }
            }
            SeriesSupport::Rule(r) => {
                for u in window.lattice_points() {
                    if u.iter().zip(&r.ranges).all(|(&x, cr)| cr.contains(x)) {
                        let g = r.valuation.eval(&u);
                        terms.insert(u, ValuedCoefficient::term(g, Q::from_integer(1.into())));
                    }
                }
            }
        }
        Ok(LaurentPolynomial {
            rank: self.rank,
            terms,
        })
    }
}

/// Finite Laurent polynomial with valued coefficients, no zero terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPolynomial {
    rank: usize,
    terms: BTreeMap<Vec<i64>, ValuedCoefficient>,
}

impl LaurentPolynomial {
    pub fn from_terms(rank: usize, pairs: Vec<(Vec<i64>, ValuedCoefficient)>) -> Result<Self> {
        let mut terms: BTreeMap<Vec<i64>, ValuedCoefficient> = BTreeMap::new();
        for (u, c) in pairs {
            if u.len() != rank {
                return Err(Error::InvalidInput(
                    "term exponent arity does not match rank".into(),
                ));
            }
            let entry = terms.entry(u).or_insert_with(ValuedCoefficient::zero);
            *entry = &*entry + &c;
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(LaurentPolynomial { rank, terms })
    }

    pub fn zero(rank: usize) -> Self {
        LaurentPolynomial {
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &ValuedCoefficient)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn support(&self) -> Vec<Vec<i64>> {
        self.terms.keys().cloned().collect()
    }

    pub fn coefficient(&self, u: &[i64]) -> Option<&ValuedCoefficient> {
        self.terms.get(u)
    }

    pub fn add(&self, other: &LaurentPolynomial) -> Result<LaurentPolynomial> {
        if self.rank != other.rank {
            return Err(Error::InvalidInput("rank mismatch in addition".into()));
        }
        let pairs = self
            .terms
            .iter()
            .chain(other.terms.iter())
            .map(|(u, c)| (u.clone(), c.clone()))
            .collect();
        LaurentPolynomial::from_terms(self.rank, pairs)
    }

    pub fn mul(&self, other: &LaurentPolynomial) -> Result<LaurentPolynomial> {
        if self.rank != other.rank {
            return Err(Error::InvalidInput("rank mismatch in product".into()));
        }
        let mut pairs = Vec::new();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                let w: Vec<i64> = u.iter().zip(v).map(|(&x, &y)| x + y).collect();
                pairs.push((w, a * b));
            }
        }
        LaurentPolynomial::from_terms(self.rank, pairs)
    }
}

#[derive(Serialize, Deserialize)]
struct LaurentTermDto {
    u: Vec<i64>,
    coef: ValuedCoefficient,
}

#[derive(Serialize, Deserialize)]
struct LaurentDto {
    rank: usize,
    terms: Vec<LaurentTermDto>,
}

impl Serialize for LaurentPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LaurentDto {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .map(|(u, c)| LaurentTermDto {
                    u: u.clone(),
                    coef: c.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let dto = LaurentDto::deserialize(d)?;
        LaurentPolynomial::from_terms(
            dto.rank,
            dto.terms.into_iter().map(|t| (t.u, t.coef)).collect(),
        )
        .map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct ExplicitTermDto {
    u: Vec<i64>,
    coef: ValuedCoefficient,
}

#[derive(Serialize, Deserialize)]
struct RuleDto {
    ranges: Vec<CoordRange>,
    valuation: Vec<ExponentTermDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum SupportDto {
    Explicit(Vec<ExplicitTermDto>),
    Rule(RuleDto),
}

#[derive(Serialize, Deserialize)]
struct SeriesDto {
    rank: usize,
    support: SupportDto,
}

impl Serialize for SeriesSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let support = match &self.support {
            SeriesSupport::Explicit(map) => SupportDto::Explicit(
                map.iter()
                    .map(|(u, c)| ExplicitTermDto {
                        u: u.clone(),
                        coef: c.clone(),
                    })
                    .collect(),
            ),
            SeriesSupport::Rule(r) => SupportDto::Rule(RuleDto {
                ranges: r.ranges.clone(),
                valuation: r
                    .valuation
                    .terms
                    .iter()
                    .map(|(p, c)| ExponentTermDto {
                        exps: p.clone(),
                        coef: fmt_q(c),
                    })
                    .collect(),
            }),
        };
        SeriesDto {
            rank: self.rank,
            support,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SeriesSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let dto = SeriesDto::deserialize(d)?;
        let build = || -> Result<SeriesSpec> {
            match dto.support {
                SupportDto::Explicit(terms) => SeriesSpec::explicit(
                    dto.rank,
                    terms.into_iter().map(|t| (t.u, t.coef)).collect(),
                ),
                SupportDto::Rule(rule) => {
                    let terms = rule
                        .valuation
                        .into_iter()
                        .map(|t| Ok((t.exps, parse_q(&t.coef)?)))
                        .collect::<Result<Vec<_>>>()?;
                    SeriesSpec::rule(dto.rank, rule.ranges, ExponentPoly::new(dto.rank, terms)?)
                }
            }
        };
        build().map_err(|e| D::Error::custom(e.to_string()))
    }
}
