//! Spherical functions on `Sp₄(ℝ)`: Haar quadrature over `K ≅ U(2)`, the
//! Harish-Chandra `c`-function, decay and phase diagnostics, and the spectral
//! test function with its inverse transform.

pub mod cfunction;
pub mod decay;
pub mod error;
pub mod quadrature;
pub mod spectral;
pub mod spherical;
pub mod inverse;
pub mod phase;
pub mod testfn;

pub use error::{Result, SphericalError};
pub use quadrature::{HaarRule, QuadratureRule};
pub use spectral::{SpectralParameter, SpectrumRegion};
pub use spherical::{phi, phi_at_level, PhiValue};
