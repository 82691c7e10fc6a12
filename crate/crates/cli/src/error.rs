use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Malformed or out-of-hypothesis configuration (exit code 2).
    #[error("config error: {0}")]
    Config(String),
    /// A checked invariant did not hold (exit code 1).
    #[error("invariant failure: {0}")]
    Invariant(String),
    #[error(transparent)]
    Core(#[from] fhs_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Core(fhs_core::Error::Domain(_)) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;

pub(crate) fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(HarnessError::Config(msg.into()))
}
