use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sizing error: {0}")]
    Sizing(String),

    #[error("no fixed point found: {0}")]
    NoFixedPoint(String),

    #[error("step size underflow at t = {t_last}")]
    StepUnderflow { t_last: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("bootstrap violation at t = {t}: {reason}")]
    Bootstrap { t: f64, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
