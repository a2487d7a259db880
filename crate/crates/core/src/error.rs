//! Error type shared across the toolkit.
//!
//! Variants map onto the CLI exit codes: validation errors exit with 2,
//! numerical errors with 3 and I/O or ingestion errors with 4.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented precondition or invariant.
    #[error("validation: {0}")]
    Validation(String),

    /// An iterative routine failed to reach its tolerance.
    #[error("numerical: {msg} (achieved residual {residual:e})")]
    Numerical { msg: String, residual: f64 },

    /// A cell of an ingested file could not be interpreted.
    #[error("parse error at row {row}, column {column}: {msg}")]
    Parse {
        row: usize,
        column: String,
        msg: String,
    },

    /// Malformed configuration (scenario or model spec file).
    #[error("config: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Exit code for the CLI: 2 validation, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Config(_) => 2,
            Error::Numerical { .. } => 3,
            Error::Parse { .. } | Error::Io(_) | Error::Csv(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
