use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unbounded interval: {0}")]
    Unbounded(String),
    #[error("{count} atoms lie outside the averaging window [-{n}, {n}]")]
    OutsideWindow { count: usize, n: f64 },
    #[error("{count} atoms exceed the pair-sum limit of {limit}")]
    TooLarge { count: usize, limit: usize },
    #[error("insufficient points: {0}")]
    InsufficientPoints(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("input is not pure point: {0}")]
    NotPurePoint(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
