use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by configuration, model construction and dataset output.
#[derive(Debug, Error)]
pub enum Error {
    /// A value failed its invariant. `key` names the offending config key or
    /// argument.
    #[error("invalid `{key}`: {reason}")]
    Invalid { key: String, reason: String },

    #[error("energy conservation violated: {0}")]
    EnergyConservation(String),

    #[error("infeasible radiation profile: {0}")]
    InfeasibleProfile(String),

    #[error("expected a {expected} channel, got {found}")]
    ArchitectureMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("failed to parse {path}: {message}")]
    Parse { path: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn invalid(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 for I/O failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
