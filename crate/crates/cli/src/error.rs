//! Error type of the front end and its exit-code contract.

use std::path::PathBuf;

/// Exit code of a successful command (all checks pass).
pub const EXIT_OK: u8 = 0;
/// Exit code when a verification check or a computation fails.
pub const EXIT_CHECK_FAILED: u8 = 1;
/// Exit code for usage and configuration errors.
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("computation failed: {0}")]
    Compute(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => EXIT_USAGE,
            _ => EXIT_CHECK_FAILED,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

impl From<growup_core::params::ParamsError> for CliError {
    fn from(e: growup_core::params::ParamsError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<growup_core::pde::PdeError> for CliError {
    fn from(e: growup_core::pde::PdeError) -> Self {
        // every PdeError describes an invalid configuration or initial datum
        CliError::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
