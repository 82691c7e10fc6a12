use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Parameters outside the admissible region of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The operation is undefined for this input (e.g. a quotient of the zero field).
    #[error("undefined input: {0}")]
    Undefined(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("malformed field file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
