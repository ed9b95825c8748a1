use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid footprint: {0}")]
    Footprint(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("control has {got} components but model `{model}` expects {expected}")]
    ControlMismatch {
        model: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("invalid scenario at {pointer}: {message}")]
    Scenario { pointer: String, message: String },
    #[error("grid of {cells} cells exceeds the cap of {cap}")]
    GridTooLarge { cells: usize, cap: usize },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn scenario(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Scenario {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}
