use std::path::{Path, PathBuf};

use thiserror::Error;

/// Failures that end a command, each tied to a fixed process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Starvation(puf_trng_core::Error),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    /// A self-test check did not hold. Reported like a statistical failure.
    #[error("self-test failed: {0}")]
    SelfTest(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::SelfTest(_) => exit::FAIL,
            CliError::Usage(_) => exit::USAGE,
            CliError::Starvation(_) => exit::STARVATION,
            CliError::Io { .. } => exit::IO,
        }
    }

    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            message: err.to_string(),
        }
    }

    /// Classifies a core error raised while touching `path`.
    pub fn from_core(path: &Path, err: puf_trng_core::Error) -> Self {
        use puf_trng_core::Error as E;
        match err {
            E::Starvation { .. } => CliError::Starvation(err),
            E::Io(_) | E::Json(_) | E::Format(_) => CliError::io(path, err),
            other => CliError::Usage(other.to_string()),
        }
    }
}

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const FAIL: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const STARVATION: i32 = 3;
    pub const IO: i32 = 4;
}

pub type CliResult<T> = std::result::Result<T, CliError>;
