use thiserror::Error;

/// Errors of the geometric and statistical operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Inputs violate a precondition (dimension mismatch, out-of-range
    /// parameter, inconsistent configuration).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The input configuration is degenerate: affinely dependent tuples,
    /// singular systems, collapsed projections.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The requested check is not defined for this parametrization
    /// (e.g. a finite-difference Jacobian for a chart-incomplete theorem).
    #[error("unsupported theorem: {0}")]
    UnsupportedTheorem(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
}
