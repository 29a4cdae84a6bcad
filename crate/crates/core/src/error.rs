use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("step size underflow at s = {s} (h = {h:e}); tolerance too tight for f64")]
    StepUnderflow { s: f64, h: f64 },

    #[error("arclength {s} outside profile extent [-{s_max}, {s_max}]")]
    OutOfRange { s: f64, s_max: f64 },

    #[error("{what} {value} not reached by the profile (largest {max})")]
    Beyond { what: &'static str, value: f64, max: f64 },

    #[error("no bracket found: {0}")]
    NoBracket(String),

    #[error("construction failed at step `{step}`: {reason}")]
    Construction { step: &'static str, reason: String },

    #[error("flow stopped at t = {t}: {reason}")]
    Flow { t: f64, reason: String },

    #[error("tip tracking failed: {0}")]
    Tip(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
