use std::io;

use mqed::model::ValidationReport;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Invalid(ValidationReport),

    #[error("{0}")]
    Usage(String),

    #[error("{path}: unrecognized header {header:?}")]
    UnrecognizedHeader { path: String, header: String },

    #[error("numerical failure: {0}")]
    Numerical(mqed::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, source: io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// 2 for anything wrong with the input, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. }
            | CliError::Invalid(_)
            | CliError::Usage(_)
            | CliError::UnrecognizedHeader { .. } => 2,
            CliError::Numerical(mqed::Error::Validation(_))
            | CliError::Numerical(mqed::Error::InvalidArgument(_)) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

impl From<mqed::Error> for CliError {
    fn from(e: mqed::Error) -> Self {
        CliError::Numerical(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
