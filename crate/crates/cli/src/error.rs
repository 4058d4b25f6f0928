use sp4_counting::CountingError;
use sp4_hecke::HeckeError;
use sp4_spherical::SphericalError;
use thiserror::Error;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAILURE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Hecke(#[from] HeckeError),
    #[error(transparent)]
    Spherical(#[from] SphericalError),
    #[error(transparent)]
    Counting(#[from] CountingError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Hecke(e) => match e {
                HeckeError::NotPrime(_) | HeckeError::InvalidLabel(_) => EXIT_USAGE,
                HeckeError::Budget { .. } | HeckeError::Io(_) | HeckeError::Cache(_) => EXIT_RESOURCE,
                _ => EXIT_FAILURE,
            },
            CliError::Spherical(e) => match e {
                SphericalError::Invalid(_) | SphericalError::Level(_) => EXIT_USAGE,
                SphericalError::Budget { .. } | SphericalError::Io(_) | SphericalError::Csv(_) => EXIT_RESOURCE,
                SphericalError::Core(_) => EXIT_FAILURE,
            },
            CliError::Counting(e) => match e {
                CountingError::Invalid(_) | CountingError::DeltaCeiling(_) => EXIT_USAGE,
                CountingError::Budget { .. } | CountingError::Io(_) | CountingError::Csv(_) => EXIT_RESOURCE,
                _ => EXIT_FAILURE,
            },
            CliError::Io(_) | CliError::Json(_) | CliError::Csv(_) => EXIT_RESOURCE,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
