use thiserror::Error;

use crate::label::DoubleCosetLabel;

#[derive(Debug, Error)]
pub enum HeckeError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("invalid label: {0}")]
    InvalidLabel(String),
    #[error("elements for different primes ({0} and {1}) cannot be combined")]
    PrimeMismatch(u64, u64),
    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    Budget { what: String, needed: u128, budget: u128 },
    #[error("multiplicity inconsistency in {context}: label {label} has multiplicities {first} and {second}")]
    Multiplicity { context: String, label: DoubleCosetLabel, first: u64, second: u64 },
    #[error("internal defect: {0}")]
    Defect(String),
    #[error("calibration inconsistency: {0}")]
    Calibration(String),
    #[error("cache error: {0}")]
    Cache(String),
    #[error(transparent)]
    Core(#[from] sp4_core::CoreError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HeckeError {
    pub fn is_budget(&self) -> bool {
        matches!(self, HeckeError::Budget { .. })
    }
}

pub type Result<T> = std::result::Result<T, HeckeError>;
