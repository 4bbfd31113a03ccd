use std::io;
use std::path::PathBuf;

use stirap_core::Error;

use crate::config::ConfigError;

/// Failure of a CLI run, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("numeric failure: {0}")]
    Numeric(Error),
    #[error("unknown preset `{0}` (see list-presets)")]
    UnknownPreset(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. }
            | Error::SchemeMismatch { .. }
            | Error::UnknownScheme(_)
            | Error::UnknownObservable(_)
            | Error::UnknownConstraint(_)
            | Error::UnknownSweepParam(_)
            | Error::DimensionMismatch { .. } => RunError::Config(ConfigError::Invalid(e)),
            _ => RunError::Numeric(e),
        }
    }
}

impl RunError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        RunError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for configuration problems, 3 for integration or tracking
    /// failures, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) | RunError::UnknownPreset(_) => 2,
            RunError::Numeric(_) => 3,
            RunError::Io { .. } | RunError::Pool(_) => 1,
        }
    }
}
