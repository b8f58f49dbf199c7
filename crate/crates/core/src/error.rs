use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid homomorphism: {0}")]
    InvalidHom(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("construction check failed: {0}")]
    Construction(String),
    #[error("underlying graph is disconnected")]
    Disconnected,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
