use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("series is not invertible: {0}")]
    NonInvertible(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("divisibility error: {0}")]
    Divisibility(String),
    #[error("insufficient truncation: {0}")]
    InsufficientTruncation(String),
    #[error("summability error: {0}")]
    Summability(String),
    #[error("internal consistency error: {0}")]
    Structural(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
