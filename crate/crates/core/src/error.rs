//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Argument outside the validated range of an approximation.
    #[error("range error: {0}")]
    Range(String),

    /// Grid too small for the requested stencil.
    #[error("size error: {0}")]
    Size(String),

    /// Mismatched grids.
    #[error("shape error: {0}")]
    Shape(String),

    /// Least-squares extraction failed (ill-conditioned or bad window).
    #[error("fit error: {0}")]
    Fit(String),

    /// Caller broke a documented precondition.
    #[error("usage error: {0}")]
    Usage(String),

    /// A numerical procedure failed to converge or produced a singular system.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// The boundary closure could not determine the singular coefficients.
    #[error("closure error: {0}")]
    Closure(String),

    /// Boundary triple not realizable as a self-adjoint extension.
    #[error("inadmissible boundary triple: {0}")]
    Inadmissible(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
