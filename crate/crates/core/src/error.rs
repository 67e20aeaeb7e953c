use thiserror::Error;

/// Errors raised across the kernel.
#[derive(Debug, Error)]
pub enum Error {
    #[error("orientation error: det(F) = {det:e} must exceed {min:e}")]
    Orientation { det: f64, min: f64 },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("symmetry violated: {0}")]
    Symmetry(String),

    #[error("validation failed ({invariant}): {detail}")]
    Validation { invariant: &'static str, detail: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error("fault opening at fault point {point}: sigma_N = {sigma_n:e}")]
    FaultOpening { point: usize, sigma_n: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
