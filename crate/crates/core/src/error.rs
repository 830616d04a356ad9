use thiserror::Error;

/// Errors raised by the solver, its oracles and the study harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    Parameter { field: &'static str, reason: String },

    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },

    #[error("incompatible grids: {0}")]
    Grid(String),

    #[error("solution diverged at step {step} (t = {t})")]
    Diverged { step: u64, t: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("oracle disagreement {observed:e} exceeds threshold {threshold:e}")]
    Disagreement { observed: f64, threshold: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Error {
    Error::Parameter {
        field,
        reason: reason.into(),
    }
}
