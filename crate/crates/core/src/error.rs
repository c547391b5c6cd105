use thiserror::Error;

/// Errors raised by the library.
///
/// The variants map one-to-one onto the CLI exit codes: argument and
/// parse problems are validation failures, `ResourceLimit` is reserved for
/// inputs that exceed an enumeration or exhaustive-search budget.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn budget(msg: impl Into<String>) -> Self {
        Error::ResourceLimit(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
