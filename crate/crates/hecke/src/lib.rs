//! The local Hecke algebra of `Sp₄(ℤ)` at a prime `p`.

pub mod amplifier;
pub mod block;
pub mod cache;
pub mod cosets;
pub mod eigen;
pub mod error;
pub mod identities;
pub mod label;
pub mod multiply;
pub mod satake;

pub use cosets::{left_cosets, CosetTable, HnfKey};
pub use error::{HeckeError, Result};
pub use label::{DoubleCosetLabel, HeckeElement};
