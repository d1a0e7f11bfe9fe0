use std::fmt;

use thiserror::Error;

/// Parse failure with a character offset into the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(position: usize, message: impl Into<String>) -> Self {
        ParseError { position, message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at offset {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("operation `{0}` is undefined on the identity word")]
    IdentityWord(&'static str),
    #[error("parse error {0}")]
    Parse(#[from] ParseError),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("word too long to expand: {0}")]
    TooLarge(String),
    #[error("coefficient error: {0}")]
    Coefficients(String),
    #[error("underlying graph error: {0}")]
    Underlying(String),
    #[error("construction invariant violated: {0}")]
    Construction(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
