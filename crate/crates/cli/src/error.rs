use std::io;
use std::path::PathBuf;

use gse_core::GseError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// A configuration value violates the schema; `pointer` is a JSON pointer.
    #[error("{path}: {pointer}: {message}")]
    Schema {
        path: String,
        pointer: String,
        message: String,
    },

    #[error("{0}")]
    Usage(String),

    /// Malformed row in an input data file, `line` is 1-based.
    #[error("{}:{line}: {message}", path.display())]
    Data {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error(transparent)]
    Model(#[from] GseError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for bad configuration or input, 3 for numeric failures, 4 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Schema { .. } | CliError::Usage(_) | CliError::Data { .. } => 2,
            CliError::Model(e) => match e {
                GseError::InvalidInput(_) | GseError::DuplicatePosition { .. } | GseError::NonPhysical(_) => 2,
                _ => 3,
            },
            CliError::Io { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
