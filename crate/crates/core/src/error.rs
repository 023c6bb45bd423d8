//! Error type shared by the whole toolkit.

use std::path::PathBuf;

/// Errors produced by feature extraction, data handling, training and evaluation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    /// A malformed row or line in an input file, with its location.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error("stratification failed: {0}")]
    Stratification(String),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("ROC is undefined: {0}")]
    UndefinedRoc(String),

    #[error("within-class scatter is singular; offending columns: {}", columns.join(", "))]
    SingularScatter { columns: Vec<String> },

    #[error("model load failed: {0}")]
    ModelLoad(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
