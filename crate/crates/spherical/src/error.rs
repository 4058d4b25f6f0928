use thiserror::Error;

#[derive(Debug, Error)]
pub enum SphericalError {
    #[error("quadrature level {0} is outside 1..={max}", max = crate::quadrature::MAX_LEVEL)]
    Level(u32),
    #[error("{what} needs {needed} evaluations, budget is {budget}")]
    Budget { what: String, needed: u128, budget: u128 },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] sp4_core::CoreError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, SphericalError>;
