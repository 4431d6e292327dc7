use thiserror::Error;

/// Engine-level failure modes.
///
/// `InvalidInput` covers precondition violations (bad ranks, malformed
/// specs, empty supports where nonempty is required). `BudgetExhausted` is
/// reserved for bounded searches that may legitimately fail, such as
/// generic-matrix sampling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("residue of zero coefficient is undefined")]
    ZeroResidue,
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("operation undefined for an empty polyhedron")]
    EmptyPolyhedron,
    #[error("matrix is not generic for the given complex: {0}")]
    NonGenericMap(String),
    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("malformed JSON input: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
