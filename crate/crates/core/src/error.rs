use thiserror::Error;

/// Errors raised by the toolkit.
///
/// `Config` covers every precondition violation (bad lengths, bad parameter
/// combinations); `Numerical` is reserved for failures that only show up once
/// numbers are crunched, such as a rank-deficient least-squares system.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}
