use thiserror::Error;

/// Errors raised by every layer of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("dimension must be positive")]
    ZeroDimension,

    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    Hermiticity { deviation: f64 },

    #[error("weak value undefined: {context} has probability {probability:e}")]
    UndefinedWeakValue { context: String, probability: f64 },

    #[error("operators do not commute (max |[rho, A]| = {norm:e})")]
    Commutation { norm: f64 },

    #[error("{field}: {reason}")]
    Validation { field: String, reason: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation { field: field.into(), reason: reason.into() }
    }

    pub(crate) fn undefined(context: impl Into<String>, probability: f64) -> Self {
        Error::UndefinedWeakValue { context: context.into(), probability }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}
