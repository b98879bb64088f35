use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A documented precondition of an operation was violated.
    #[error("contract violation: {0}")]
    Contract(String),
    /// An enumeration or state-space bound was exceeded.
    #[error("size limit exceeded: {0}")]
    Size(String),
    /// An input value lies outside the domain of a strategy or model.
    #[error("domain error: {0}")]
    Domain(String),
    /// A measure, strategy or potential file could not be interpreted.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}

pub(crate) fn size<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Size(msg.into()))
}
