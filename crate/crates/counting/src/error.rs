use thiserror::Error;

#[derive(Debug, Error)]
pub enum CountingError {
    #[error("quadratic part is not positive definite")]
    NotDefinite,
    #[error("discriminant {found} is below the configured bound {bound}")]
    Discriminant { found: f64, bound: f64 },
    #[error("{what} needs {needed} steps, budget is {budget}")]
    Budget { what: String, needed: u128, budget: u128 },
    #[error("delta {0} exceeds the ceiling 0.3")]
    DeltaCeiling(f64),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("runtime guard failed: {0}")]
    Guard(String),
    #[error(transparent)]
    Core(#[from] sp4_core::CoreError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CountingError>;
