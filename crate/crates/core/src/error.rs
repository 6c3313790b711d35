use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("panel has no haplotypes")]
    EmptyPanel,

    #[error("column {column} out of range (valid: 0..{limit})")]
    ColumnRange { column: usize, limit: usize },

    #[error("index corruption: {0}")]
    Corruption(String),

    #[error("workspace state: {0}")]
    State(String),

    #[error("no panel row matches the query on columns {start}..={end}")]
    NoMatch { start: usize, end: usize },

    #[error("malformed request: {0}")]
    MalformedRequest(String),

    #[error("verification failed: {0}")]
    Mismatch(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
