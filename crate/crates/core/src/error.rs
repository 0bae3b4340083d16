use std::path::PathBuf;

use thiserror::Error;

/// Errors produced across the library.
///
/// The variants map onto three failure classes that callers (the CLI in
/// particular) branch on: malformed input, numerical breakdown, and violated
/// preconditions.
#[derive(Debug, Error)]
pub enum CoxError {
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: u64,
        column: String,
        message: String,
    },

    #[error("{path}: {message}")]
    Format { path: String, message: String },

    #[error("cannot read or write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("numerical failure at iteration {iteration}: {message}")]
    Numerical { iteration: usize, message: String },

    #[error("no uncensored observations")]
    NoEvents,

    #[error("degenerate labeling: {0}")]
    DegenerateLabeling(String),

    #[error("contract violation: {0}")]
    Contract(String),
}

impl CoxError {
    pub fn contract(msg: impl Into<String>) -> Self {
        CoxError::Contract(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CoxError::Io {
            path: path.into(),
            source,
        }
    }

    /// Failure class used for process exit codes.
    pub fn class(&self) -> ErrorClass {
        match self {
            CoxError::Parse { .. } | CoxError::Format { .. } | CoxError::Io { .. } => {
                ErrorClass::Parse
            }
            CoxError::Numerical { .. } => ErrorClass::Numerical,
            CoxError::NoEvents | CoxError::DegenerateLabeling(_) | CoxError::Contract(_) => {
                ErrorClass::Contract
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Parse,
    Numerical,
    Contract,
}

pub type Result<T> = std::result::Result<T, CoxError>;
