use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("invalid extension: {0}")]
    InvalidExtension(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("oracle size guard exceeded: {0} elements")]
    SizeGuard(u64),
    #[error("refused: {0}")]
    Refused(String),
}

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse { pos, msg: msg.into() }
    }

    pub(crate) fn precision(msg: impl Into<String>) -> Self {
        Error::InsufficientPrecision(msg.into())
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Error::InsufficientPrecision(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
