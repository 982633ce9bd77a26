use thiserror::Error;

use infopower_core::Error as CoreError;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Validation(#[from] CoreError),
    #[error("invalid sweep: {0}")]
    InvalidSpec(String),
    #[error("dimension {dim} exceeds the limit of {limit}")]
    DimensionLimitExceeded { dim: usize, limit: usize },
    #[error("unknown source '{0}': not a catalog family or readable file")]
    UnknownSource(String),
}

impl CliError {
    /// 1 for unusable input, 2 for numerical failure inside an algorithm.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(CoreError::DegenerateUpdate) => 2,
            _ => 1,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}
