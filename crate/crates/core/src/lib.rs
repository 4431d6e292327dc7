//! Exact tropical geometry over non-archimedean valued fields.
//!
//! Everything is computed in exact rational arithmetic: coefficients are
//! finite formal sums of rational powers of a uniformizer, tropical data
//! lives in rational polyhedral complexes described by integer constraints,
//! and every answer (cell structure, projection, closure, verdict) is a
//! certificate that can be re-checked independently.
//!
//! Module layout:
//! - [`rat`]: rational scalars and the valuation value semiring with infinity
//! - [`valcoef`]: truncated coefficient arithmetic with exact valuations
//! - [`series`]: multivariate series specs (explicit or rule-based) and
//!   window truncation to Laurent polynomials
//! - [`linalg`]: exact rational and integer lattice linear algebra
//! - [`polyhedra`]: H-representation polyhedra, exact LP, complexes, and
//!   lower hulls / min-envelopes
//! - [`trophyper`]: tropicalization, initial forms, domain complexes and
//!   tropical hypersurfaces
//! - [`project`]: monomial maps, generic sampling, pushforward/preimage
//! - [`extended`]: fans, torus-orbit strata, extended tropicalizations
//! - [`detect`]: finiteness detection with verifiable certificates

pub mod detect;
pub mod error;
pub mod extended;
pub mod linalg;
pub mod par;
pub mod polyhedra;
pub mod project;
pub mod rat;
pub mod series;
pub mod trophyper;
pub mod valcoef;

pub use error::Error;
pub use rat::{Val, Q};
