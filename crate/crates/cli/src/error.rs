use std::path::PathBuf;

use thiserror::Error;

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// An invariant or checked property failed.
pub const EXIT_VIOLATION: i32 = 2;
/// A size guard refused the problem.
pub const EXIT_GUARD: i32 = 3;
/// Unreadable input, malformed file or bad configuration.
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] lacunary::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Violation(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(lacunary::Error::GuardExceeded { .. }) => EXIT_GUARD,
            CliError::Core(lacunary::Error::Io { .. } | lacunary::Error::Parse { .. }) => EXIT_IO,
            CliError::Core(_) | CliError::Violation(_) => EXIT_VIOLATION,
            CliError::Config(_) | CliError::Io { .. } => EXIT_IO,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
