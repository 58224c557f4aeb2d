use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] local_nash::Error),

    #[error("{0}")]
    Input(String),

    #[error("cannot read {}: {source}", .path.display())]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {}: {source}", .path.display())]
    Write { path: PathBuf, source: std::io::Error },

    #[error("csv output to {}: {source}", .path.display())]
    Csv { path: PathBuf, source: csv::Error },
}

impl CliError {
    /// 2 for bad input, 3 for numerical failure, 4 for the dimension guard.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(local_nash::Error::DimensionGuard { .. }) => 4,
            CliError::Core(e) if e.is_input_error() => 2,
            CliError::Core(_) => 3,
            CliError::Input(_) | CliError::Read { .. } | CliError::Write { .. } | CliError::Csv { .. } => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
