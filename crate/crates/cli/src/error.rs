use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: u64,
        msg: String,
    },

    #[error("{path}:{line}: expected {expected} fields, found {found}")]
    Ragged {
        path: PathBuf,
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error("{0}: no data rows")]
    EmptyDataset(PathBuf),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Model(#[from] topoartmap::Error),

    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    /// Process exit code: 1 for problems with the user's input, 2 for
    /// failures inside the engine or while writing results.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(topoartmap::Error::Inconsistent(_)) | CliError::Output(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
