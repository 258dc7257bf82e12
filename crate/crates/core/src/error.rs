//! Shared error type for the whole crate.

/// Errors produced by the numerical machinery.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quadrature failed to reach the requested relative tolerance.
    /// Carries the two refinement estimates so the caller can judge.
    #[error("quadrature tolerance not met: coarse={coarse}, fine={fine}, rel_tol={rel_tol}")]
    ToleranceNotMet { coarse: f64, fine: f64, rel_tol: f64 },

    /// Invalid or inconsistent configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A built artifact failed its own post-construction verification.
    #[error("verification failed: {0}")]
    Verification(String),

    /// Malformed serialized artifact.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
