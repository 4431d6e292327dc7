//! Tropicalization of Laurent polynomials with valued coefficients.
//!
//! Trop(f)(w) = min over terms of val(a_u) + <w, u>. The argmin sets
//! induce a polyhedral subdivision of R^r whose maximal cells carry a
//! unique minimizing exponent; the tropical hypersurface is the locus
//! where at least two terms tie, equivalently the (r-1)-skeleton of
//! that subdivision.

use crate::error::{Error, Result};
use crate::polyhedra::{
    envelope_complex, hull_vertices, EnvelopeCell, LiftedPoint, PolyhedralComplex,
};
use crate::rat::{dot_int, fmt_q, Q};
use crate::series::LaurentPolynomial;
use crate::Val;
use num_traits::Zero;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;

/// One term's tropical data: exponent, coefficient valuation, and the
/// residue of the leading scalar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropTerm {
    pub exponent: Vec<i64>,
    pub valuation: Q,
    pub residue: Q,
}

/// The tropicalization of a nonzero Laurent polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tropicalization {
    rank: usize,
    /// Sorted by exponent; valuations finite, residues nonzero.
    terms: Vec<TropTerm>,
}

pub fn tropicalize(f: &LaurentPolynomial) -> Result<Tropicalization> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut terms = Vec::with_capacity(f.num_terms());
    for (u, c) in f.terms() {
        let Val::Finite(v) = c.valuation() else {
            unreachable!("nonzero coefficient has finite valuation");
        };
        terms.push(TropTerm {
            exponent: u.clone(),
            valuation: v,
            residue: c.residue_lead()?,
        });
    }
    Ok(Tropicalization {
        rank: f.rank(),
        terms,
    })
}

impl Tropicalization {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> &[TropTerm] {
        &self.terms
    }

    fn lifted_points(&self) -> Vec<LiftedPoint> {
        self.terms
            .iter()
            .map(|t| LiftedPoint {
                point: t.exponent.clone(),
                height: t.valuation.clone(),
            })
            .collect()
    }

    /// min over terms of val(a_u) + <w, u>; finite because f is nonzero.
    pub fn eval(&self, w: &[Q]) -> Q {
        self.terms
            .iter()
            .map(|t| &t.valuation + &dot_int(w, &t.exponent))
            .min()
            .expect("tropicalization has at least one term")
    }

    /// Indices of terms attaining the minimum at w, ascending.
    pub fn argmin(&self, w: &[Q]) -> Vec<usize> {
        let values: Vec<Q> = self
            .terms
            .iter()
            .map(|t| &t.valuation + &dot_int(w, &t.exponent))
            .collect();
        let best = values.iter().min().expect("nonempty").clone();
        (0..values.len()).filter(|&i| values[i] == best).collect()
    }

    /// Sum of residue-lead monomials over the argmin at w.
    pub fn initial_form(&self, w: &[Q]) -> ResiduePolynomial {
        let terms = self
            .argmin(w)
            .into_iter()
            .map(|i| {
                (
                    self.terms[i].exponent.clone(),
                    self.terms[i].residue.clone(),
                )
            })
            .collect();
        ResiduePolynomial::from_terms(self.rank, terms)
    }

    /// Membership in the tropical hypersurface: at least two terms tie.
    pub fn hypersurface_contains(&self, w: &[Q]) -> bool {
        self.argmin(w).len() >= 2
    }

    /// The argmin subdivision of R^r with each cell's tie pattern.
    pub fn domain_complex(&self) -> Result<(PolyhedralComplex, Vec<EnvelopeCell>)> {
        envelope_complex(&self.lifted_points())
    }

    /// The tie locus as a complex: the (r-1)-skeleton of the subdivision.
    /// Empty exactly when f is a monomial.
    pub fn tropical_hypersurface(&self) -> Result<PolyhedralComplex> {
        let (complex, _) = self.domain_complex()?;
        if self.rank == 0 {
            return Ok(PolyhedralComplex::empty(0));
        }
        Ok(complex.skeleton(self.rank - 1))
    }

    /// Exponents that are uniquely minimal somewhere: the vertices of the
    /// lower hull of the lifted support. Dropping other terms leaves the
    /// tropicalization unchanged as a function.
    pub fn relevant_support(&self) -> Result<Vec<Vec<i64>>> {
        let idx = hull_vertices(&self.lifted_points())?;
        Ok(idx
            .into_iter()
            .map(|i| self.terms[i].exponent.clone())
            .collect())
    }
}

/// A polynomial over the residue field, as produced by initial forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResiduePolynomial {
    rank: usize,
    terms: BTreeMap<Vec<i64>, Q>,
}

impl ResiduePolynomial {
    pub fn from_terms(rank: usize, pairs: Vec<(Vec<i64>, Q)>) -> Self {
        let mut terms: BTreeMap<Vec<i64>, Q> = BTreeMap::new();
        for (u, c) in pairs {
            debug_assert_eq!(u.len(), rank);
            *terms.entry(u).or_insert_with(Q::zero) += c;
        }
        terms.retain(|_, c| !c.is_zero());
        ResiduePolynomial { rank, terms }
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

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Q)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, u: &[i64]) -> Option<&Q> {
        self.terms.get(u)
    }

    pub fn mul(&self, other: &ResiduePolynomial) -> ResiduePolynomial {
        assert_eq!(self.rank, other.rank, "rank mismatch in product");
        let mut pairs = Vec::new();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                let w: Vec<i64> = u.iter().zip(v).map(|(&x, &y)| x + y).collect();
                pairs.push((w, a * b));
            }
        }
        ResiduePolynomial::from_terms(self.rank, pairs)
    }
}

impl Serialize for ResiduePolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct TermDto {
            u: Vec<i64>,
            coef: String,
        }
        let mut st = s.serialize_struct("ResiduePolynomial", 2)?;
        st.serialize_field("rank", &self.rank)?;
        let terms: Vec<TermDto> = self
            .terms
            .iter()
            .map(|(u, c)| TermDto {
                u: u.clone(),
                coef: fmt_q(c),
            })
            .collect();
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}
