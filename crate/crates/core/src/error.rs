use thiserror::Error;

/// Errors raised by the group, subspace, and classification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported group: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("matrix is numerically singular (|det| = {0:e})")]
    Singular(f64),

    #[error("numerical eigendecomposition failed: residual {0:e}")]
    DefectiveEigen(f64),

    #[error("elements lie in different components: {0} vs {1}")]
    DifferentComponents(String, String),

    #[error("sampling gave up after {0} rejections")]
    RejectionLimit(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
