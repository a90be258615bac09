use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("file not found: {0}")]
    FileNotFound(PathBuf),

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: u64,
        column: String,
        message: String,
    },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] milambda::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;
