use thiserror::Error;

/// Errors raised by constructions in this crate.
///
/// Law violations are never errors; they are collected in a [`crate::Report`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamError {
    #[error("morphism count exceeds cap {cap}")]
    CapExceeded { cap: usize },
    #[error("malformed relation: {0}")]
    MalformedRelation(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("presheaves live over different base categories")]
    BaseMismatch,
    #[error("square does not commute: {0}")]
    NonCommutingSquare(String),
    #[error("bound too small: {0}")]
    BoundTooSmall(String),
    #[error("truncation is not exact: {0}")]
    InexactTruncation(String),
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("theory slice lacks unary objects: {0}")]
    MissingUnaryObjects(String),
    #[error("morphism {morphism} factors twice: {first} and {second}")]
    NonUniqueFactorization {
        morphism: String,
        first: String,
        second: String,
    },
    #[error("subcategory is not wide: {0}")]
    NotWide(String),
    #[error("subcategory is not closed under composition: {0}")]
    NotClosed(String),
    #[error("crossed group axioms fail: {0}")]
    AxiomsFailed(String),
    #[error("dimension {requested} exceeds truncation {max}")]
    DimensionExceeded { requested: usize, max: usize },
    #[error("classifying data is not functorial: {0}")]
    NonFunctorialInput(String),
    #[error("polynomial is not very fibrous: {0}")]
    NotVeryFibrous(String),
    #[error("polynomials do not compose: {0}")]
    DomainMismatch(String),
    #[error("polynomial is not quasi-familial: {0}")]
    NotQuasiFamilial(String),
}

pub type Result<T> = std::result::Result<T, FamError>;
