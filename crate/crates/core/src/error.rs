use thiserror::Error;

/// Error taxonomy shared across the crate.
///
/// The CLI maps these onto exit codes: configuration and usage problems
/// exit 2, data/format problems exit 3, failed checks exit 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("evaluation error: {0}")]
    Eval(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 usage/config, 3 data/format, 4 check failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Validation(_) => 2,
            Error::Format(_) | Error::Data(_) | Error::Io(_) | Error::Json(_) => 3,
            Error::Dimension(_) | Error::Contract(_) | Error::Eval(_) => 3,
        }
    }
}
