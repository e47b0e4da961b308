use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the lacunary toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sequence is not strictly increasing at index {index} (1-based)")]
    NonMonotone { index: usize },

    #[error("sequence terms must be positive (index {index})")]
    NonPositive { index: usize },

    #[error("dimension mismatch: sequence has {sequence} terms, weights have {weights}")]
    DimensionMismatch { sequence: usize, weights: usize },

    #[error("problem too large: {what} = {actual} exceeds limit {limit}")]
    GuardExceeded {
        what: &'static str,
        actual: u128,
        limit: u128,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error on {path:?}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("fingerprint collision while aggregating differences")]
    FingerprintCollision,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
