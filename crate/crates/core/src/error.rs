//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value violates a domain precondition (out-of-range PSE, negative
    /// duration, empty sample set, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Vector/matrix dimensions do not line up.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Configuration file or CLI arguments could not be interpreted.
    #[error("configuration error: {0}")]
    Config(String),

    /// Dataset or model files are missing, unreadable or inconsistent.
    #[error("data error: {0}")]
    Data(String),

    /// A numerical operation failed (rank-deficient fit, static failure
    /// regime in the S-N law, division by zero damage).
    #[error("numeric error: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn shape(msg: impl Into<String>) -> Self {
        Error::ShapeMismatch(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    /// Process exit code for the CLI: 2 usage/config, 3 data, 4 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::InvalidInput(_) | Error::Data(_) | Error::Io(_) | Error::Json(_) => 3,
            Error::ShapeMismatch(_) | Error::Numeric(_) => 4,
        }
    }
}
