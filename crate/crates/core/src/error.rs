use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("predicate failed on {class}: {reason}")]
    Predicate { class: String, reason: String },

    #[error("unsupported for family {family}: {what}")]
    Unsupported { family: String, what: String },

    #[error("undecided local solubility at p = {p} for {point}")]
    Undecided { p: u64, point: String },

    #[error("missing sigma entry for p = {0}")]
    MissingSigma(u64),

    #[error("malformed group action: {0}")]
    MalformedAction(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
