//! Linear algebra for `Sp₄`: integral similitudes and their canonical forms,
//! floating-point group elements, Iwasawa and Cartan projections, the root
//! system, and the Siegel upper half space.

pub mod error;
pub mod group;
pub mod hnf;
pub mod intmat;
pub mod projections;
pub mod roots;
pub mod siegel;
pub mod symplectic;

pub use error::{CoreError, Result};
pub use group::{GroupElement, Mat4, DEFAULT_TOLERANCE};
pub use hnf::{hnf, snf_exponents};
pub use intmat::{IntMat4, J};
pub use projections::{cartan_C, iwasawa_H, CartanVector};
pub use roots::RootSystemData;
pub use siegel::{moebius, point_to_group, SiegelPoint};
pub use symplectic::{similitude_of, SymplecticIntMatrix};
