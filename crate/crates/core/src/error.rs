use std::io;

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("I/O error while processing document {id}: {source}")]
    Document { id: String, source: io::Error },

    #[error("invalid UTF-8 on line {line}")]
    Utf8 { line: usize },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("vocabulary empty at min_count {0}")]
    EmptyVocabulary(u64),

    #[error("requested {k} entries but vocabulary holds {size}")]
    TooManyEntries { k: usize, size: usize },

    #[error("out of vocabulary: {0}")]
    OutOfVocabulary(String),

    #[error("undefined similarity: zero vector")]
    ZeroVector,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("empty training data: {0}")]
    EmptyInput(String),

    #[error("model contains non-finite values")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, Error>;
