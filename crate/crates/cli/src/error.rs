use std::path::PathBuf;

use gevrey_core::PdeError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("model: {0}")]
    Model(#[from] PdeError),
    #[error("{0}")]
    Numeric(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn numeric(e: impl std::fmt::Display) -> Self {
        CliError::Numeric(e.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Model(_) => 2,
            CliError::Numeric(_) | CliError::Io { .. } => 3,
        }
    }
}
