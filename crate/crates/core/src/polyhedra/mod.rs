//! Exact rational polyhedral geometry in H-representation.
//!
//! A polyhedron is stored by its canonical constraint system: independent
//! integer equality rows in reduced echelon form plus a minimal set of
//! primitive facet inequalities. Canonical form makes equality of cells a
//! syntactic comparison, which the complex layer relies on for
//! deduplication and deterministic ordering.

pub mod complex;
pub mod hull;
pub mod lp;
pub mod polyhedron;

pub use complex::PolyhedralComplex;
pub use hull::{envelope_complex, hull_vertices, lower_hull, EnvelopeCell, LiftedPoint, LowerHull};
pub use polyhedron::{cone_from_generators, Constraint, Polyhedron, VRep};

pub use crate::linalg::saturation_basis;
