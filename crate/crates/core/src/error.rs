use std::path::PathBuf;

use thiserror::Error;

/// Failures while reading or validating a dataset.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// `line` is 1-based and counts physical lines of the input, header included.
    #[error("{origin}:{line}: {message}")]
    Parse {
        origin: String,
        line: usize,
        message: String,
    },
    #[error("{origin}: {message}")]
    Validation { origin: String, message: String },
}

impl DataError {
    pub(crate) fn parse(origin: &str, line: usize, message: impl Into<String>) -> Self {
        DataError::Parse {
            origin: origin.to_string(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn validation(origin: &str, message: impl Into<String>) -> Self {
        DataError::Validation {
            origin: origin.to_string(),
            message: message.into(),
        }
    }
}

/// Domain errors raised by the information, objective, selection and oracle layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SelectError {
    #[error("column is empty")]
    EmptyColumn,
    #[error("column lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("unknown feature id {0}")]
    UnknownFeature(usize),
    #[error("feature {0} is already selected")]
    AlreadySelected(usize),
    #[error("candidate set is empty")]
    EmptyCandidates,
    #[error("k must be at least {min}, got {k}")]
    InvalidK { k: usize, min: usize },
    #[error("k = {k} exceeds the {available} available features")]
    KTooLarge { k: usize, available: usize },
    #[error("machine count must be at least 1")]
    NoMachines,
    #[error("invalid objective configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("enumeration needs {needed} subsets, over the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
}
