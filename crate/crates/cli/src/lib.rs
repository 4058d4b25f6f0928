//! Command-line orchestration of the Hecke, spherical and counting
//! verifications, with run manifests and the exponent calculator.

pub mod count;
pub mod error;
pub mod exponent;
pub mod hecke;
pub mod manifest;
pub mod spherical;

pub use error::{CliError, Result, EXIT_FAILURE, EXIT_PASS, EXIT_RESOURCE, EXIT_USAGE};
pub use manifest::{CheckLine, Outcome, RunManifest, SCHEMA_VERSION};
