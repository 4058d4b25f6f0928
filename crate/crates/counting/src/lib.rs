//! Counting integral symplectic similitudes close to a conjugate of `K`, and
//! the binary quadratic tools behind it.

pub mod context;
pub mod dirichlet;
pub mod enumerate;
pub mod error;
pub mod quadratic;
pub mod residual;
pub mod scan;

pub use context::CountingContext;
pub use enumerate::{enumerate_s, naive_enumerate, EnumerationConfig, DELTA_CEILING};
pub use error::{CountingError, Result};
pub use quadratic::{count_near_zero, solve_quadratic_integer, IntQuadPoly2, QuadPoly2};
pub use residual::{residual_check, ResidualReport};
pub use scan::{prop1_scan, ScanConfig, ScanReport, ScanRow};
