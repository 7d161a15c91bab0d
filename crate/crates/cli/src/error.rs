use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: io::Error },

    #[error("target {0} is undefined at every grid point")]
    TargetUndefined(&'static str),

    #[error("{0} check suite(s) failed")]
    CheckFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Param(_) => 3,
            CliError::Output { .. } => 4,
            CliError::TargetUndefined(_) => 5,
        }
    }
}

impl From<otto_core::qubit::QubitError> for CliError {
    fn from(e: otto_core::qubit::QubitError) -> Self {
        CliError::Param(e.to_string())
    }
}

impl From<otto_core::engine::EngineError> for CliError {
    fn from(e: otto_core::engine::EngineError) -> Self {
        CliError::Param(e.to_string())
    }
}
