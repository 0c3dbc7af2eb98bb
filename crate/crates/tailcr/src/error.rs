use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Everything the binary can fail with, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("invalid argument: {0}")]
    Usage(String),
    #[error(transparent)]
    Stats(#[from] tailcr_core::Error),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for bad input (files, flags, configs), 3 for statistical or
    /// domain failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Stats(e) => match e {
                tailcr_core::Error::Config(_) | tailcr_core::Error::InvalidObservation { .. } => 2,
                _ => 3,
            },
            _ => 2,
        }
    }
}
