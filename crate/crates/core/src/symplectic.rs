//! Integral symplectic similitudes `S(m) = {M : MᵀJM = mJ}`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::intmat::{self, IntMat4, IDENTITY, J};

/// Returns `m > 0` iff `MᵀJM = mJ`.
pub fn similitude_of(m: &IntMat4) -> Option<i64> {
    let g = intmat::try_mul(&intmat::try_mul(&intmat::transpose(m), &J).ok()?, m).ok()?;
    let s = g[0][2];
    if s <= 0 {
        return None;
    }
    (g == intmat::scale(&J, s)).then_some(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SymplecticIntMatrix {
    entries: IntMat4,
    similitude: i64,
}

impl SymplecticIntMatrix {
    pub fn new(entries: IntMat4) -> Result<Self> {
        let similitude = similitude_of(&entries).ok_or(CoreError::NotSimilitude)?;
        Ok(Self { entries, similitude })
    }

    /// Wraps entries already known to lie in `S(similitude)`; checked in debug builds.
    pub fn new_unchecked(entries: IntMat4, similitude: i64) -> Self {
        debug_assert_eq!(similitude_of(&entries), Some(similitude));
        Self { entries, similitude }
    }

    pub fn identity() -> Self {
        Self { entries: IDENTITY, similitude: 1 }
    }

    pub fn entries(&self) -> &IntMat4 {
        &self.entries
    }

    pub fn similitude(&self) -> i64 {
        self.similitude
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            entries: intmat::try_mul(&self.entries, &other.entries)?,
            similitude: self.similitude.checked_mul(other.similitude).ok_or(CoreError::Overflow)?,
        })
    }

    /// `m·M⁻¹`, again an element of `S(m)`.
    pub fn adjoint(&self) -> Self {
        Self { entries: intmat::symplectic_adjoint(&self.entries), similitude: self.similitude }
    }

    pub fn max_abs_entry(&self) -> i64 {
        self.entries.iter().flatten().map(|x| x.abs()).max().unwrap_or(0)
    }
}

/// Elementary generators of `Γ = Sp₄(ℤ)`: symmetric translations, their
/// transposes, `GL₂(ℤ)` embeddings and the Weyl element `J`.
pub fn gamma_generators() -> Vec<IntMat4> {
    let mut gens = Vec::new();
    let sym = [[[1, 0], [0, 0]], [[0, 0], [0, 1]], [[0, 1], [1, 0]]];
    let one = [[1, 0], [0, 1]];
    let zero = [[0, 0], [0, 0]];
    for s in sym {
        gens.push(intmat::from_blocks(&one, &s, &zero, &one));
        gens.push(intmat::from_blocks(&one, &zero, &s, &one));
    }
    for u in [[[1, 1], [0, 1]], [[0, 1], [1, 0]], [[-1, 0], [0, 1]]] {
        let ut_inv = intmat::transpose2(&intmat::inv_unimodular2(&u));
        gens.push(intmat::from_blocks(&u, &zero, &zero, &ut_inv));
    }
    gens.push(J);
    gens
}

/// Random element of `Γ` as a word of `len` generators (and inverses).
pub fn random_gamma<R: Rng>(rng: &mut R, len: usize) -> IntMat4 {
    let gens = gamma_generators();
    let mut g = IDENTITY;
    for _ in 0..len {
        let mut x = gens[rng.gen_range(0..gens.len())];
        if rng.gen_bool(0.5) {
            x = intmat::symplectic_adjoint(&x);
        }
        g = intmat::mul(&g, &x);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intmat::diag;
    use rand::SeedableRng;

    #[test]
    fn similitude_examples() {
        assert_eq!(similitude_of(&IDENTITY), Some(1));
        assert_eq!(similitude_of(&diag([1, 1, 3, 3])), Some(3));
        assert_eq!(similitude_of(&diag([1, 2, 3, 4])), None);
        assert_eq!(similitude_of(&diag([1, 1, -1, -1])), None);
    }

    #[test]
    fn generators_are_in_gamma() {
        for g in gamma_generators() {
            assert_eq!(similitude_of(&g), Some(1));
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            assert_eq!(similitude_of(&random_gamma(&mut rng, 12)), Some(1));
        }
    }
}
