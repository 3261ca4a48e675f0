use thiserror::Error;

use crate::prep::Category;

#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error: missing mandatory column {0:?}")]
    MissingColumn(String),

    #[error("parse error at row {row}, column {column:?}: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("invalid record at row {row}: {reason}")]
    InvalidRecord { row: usize, reason: String },

    #[error("discretizer spec error: {0}")]
    Discretizer(String),

    #[error("cannot fit bins for {attribute:?}: no non-missing values")]
    EmptyFit { attribute: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("shard routing error: instance ends at item {found} but shard key is {expected}")]
    Routing { expected: u32, found: u32 },

    #[error("measure undefined for target {0}: no transactions of that target")]
    UndefinedMeasure(Category),

    #[error("oracle refused: {0}")]
    OracleGuard(String),

    #[error("malformed dataset file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
