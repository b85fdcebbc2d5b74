//! Crate-wide error type.

/// Errors produced by the fusion calculus, the toy model, and the harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Evidence vector violates its invariants (negative, non-finite, too short).
    #[error("invalid evidence: {0}")]
    InvalidEvidence(String),

    /// Opinion violates the subjective-logic constraints.
    #[error("invalid opinion: {0}")]
    InvalidOpinion(String),

    /// Vector or matrix lengths disagree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Probability vector is not on the unit simplex.
    #[error("simplex violation: {0}")]
    SimplexViolation(String),

    /// An operation that needs at least one element received none.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// Argument outside the mathematical domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Bad configuration file or configuration value.
    #[error("config error: {0}")]
    Config(String),

    /// Malformed or inconsistent data file.
    #[error("data error: {0}")]
    Data(String),

    /// A computation produced a non-finite value.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
