use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("smoothing constant must satisfy 0 < alpha < 1, got {0}")]
    InvalidAlpha(f64),
    #[error("moving-average window must be at least 1")]
    InvalidWindow,
    #[error("n_alpha must be at least 1, got {0}")]
    InvalidNAlpha(i64),
    #[error("reset interval must be non-negative, got {0}")]
    InvalidResetInterval(i64),
    #[error("gate threshold must be positive, got {0}")]
    InvalidThreshold(i64),
    #[error("non-finite value {0}")]
    NonFinite(f64),
    #[error("no forecast available before the first observation")]
    Unprimed,
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}
