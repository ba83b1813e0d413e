use std::path::PathBuf;

use thiserror::Error;

/// Exit status for a configuration problem.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status for a failed verification or tolerance check.
pub const EXIT_VERIFY: i32 = 3;
/// Exit status when a group order or search limit is exceeded.
pub const EXIT_CAP: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}: {message}")]
    Config { path: String, line: usize, message: String },

    #[error("{path}: {message}")]
    ConfigFile { path: String, message: String },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("limit exceeded: {0}")]
    Cap(String),

    #[error(transparent)]
    Core(#[from] rtrecon_core::Error),

    #[error(transparent)]
    Gset(#[from] rtrecon_gset::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
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
            CliError::Config { .. } | CliError::ConfigFile { .. } => EXIT_CONFIG,
            CliError::Verification(_) => EXIT_VERIFY,
            CliError::Cap(_) => EXIT_CAP,
            CliError::Core(e) => match e {
                rtrecon_core::Error::ExhaustiveLimit { .. } => EXIT_CAP,
                rtrecon_core::Error::InconsistentRelations(_) => EXIT_VERIFY,
                _ => 1,
            },
            CliError::Gset(e) => match e {
                rtrecon_gset::Error::CapExceeded { .. } | rtrecon_gset::Error::SubgroupLimit { .. } => EXIT_CAP,
                _ => 1,
            },
            CliError::Io { .. } | CliError::Json(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
