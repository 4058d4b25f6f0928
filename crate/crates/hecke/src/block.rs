//! Reduction of a coset representative to block upper triangular shape.

use sp4_core::hnf::{hnf, p_power_exponent};
use sp4_core::intmat::{self, IntMat2, IntMat4, J};
use sp4_core::{similitude_of, SymplecticIntMatrix};

use crate::error::{HeckeError, Result};

/// `γM = (A B; 0 D)` in the left coset of `M`, with `D` the upper triangular
/// lower-right block of `hnf(M)` and `A = m·D^{−⊤}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockRep {
    pub matrix: SymplecticIntMatrix,
    /// `p`-adic valuations of the diagonal of `D`.
    pub alpha: u32,
    pub beta: u32,
}

fn row_form(u: &[i64; 4], v: &[i64; 4]) -> i128 {
    let mut s = 0i128;
    for i in 0..4 {
        for j in 0..4 {
            s += u[i] as i128 * J[i][j] as i128 * v[j] as i128;
        }
    }
    s
}

fn defect(msg: &str) -> HeckeError {
    HeckeError::Defect(format!("block_reduce: {msg}"))
}

/// Block reduction of `M ∈ S(pʳ)`. Any `M` whose row lattice is that of a
/// member of `S(pʳ)` is accepted, in particular an HNF key.
///
/// The rows `F` of the HNF spanning the last two coordinates are completed to a
/// symplectic basis by rows `E` of the same lattice: first `E` is made dual to
/// `F` under `(1/m)·J`, then the remaining pairing inside `E` is cleared with a
/// multiple of `F`.
pub fn block_reduce(m_in: &IntMat4, p: u64, r: u32) -> Result<BlockRep> {
    let m = (p as i64).pow(r);
    let g = intmat::mul(&intmat::mul(m_in, &J), &intmat::transpose(m_in));
    if g.iter().flatten().any(|x| x % m != 0) || intmat::det(m_in).abs() != (m as i128) * (m as i128) {
        return Err(HeckeError::InvalidLabel(format!("matrix does not span a row lattice of S({m})")));
    }
    let h = hnf(m_in)?;
    let mm = m as i128;
    let e = [h[0], h[1]];
    let f = [h[2], h[3]];
    let form = |u: &[i64; 4], v: &[i64; 4]| -> Result<i64> {
        let s = row_form(u, v);
        if s % mm != 0 {
            return Err(defect("pairing not divisible by the similitude"));
        }
        Ok((s / mm) as i64)
    };
    let mut pm: IntMat2 = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            pm[i][j] = form(&e[i], &f[j])?;
        }
    }
    if intmat::det2(&pm).abs() != 1 {
        return Err(defect("pairing between row blocks is not unimodular"));
    }
    let pinv = intmat::inv_unimodular2(&pm);
    let mut e1 = [[0i64; 4]; 2];
    for i in 0..2 {
        for c in 0..4 {
            e1[i][c] = pinv[i][0] * e[0][c] + pinv[i][1] * e[1][c];
        }
    }
    let s = form(&e1[0], &e1[1])?;
    let mut e2 = e1;
    for c in 0..4 {
        e2[0][c] += s * f[1][c];
    }
    let out = [e2[0], e2[1], f[0], f[1]];

    if similitude_of(&out) != Some(m) {
        return Err(defect("output is not a similitude"));
    }
    if hnf(&out)? != h {
        return Err(defect("output left the coset"));
    }
    let (a, _, c, d) = intmat::blocks(&out);
    if c != [[0, 0], [0, 0]] || d[1][0] != 0 {
        return Err(defect("output is not block upper triangular"));
    }
    let adt = intmat::mul2(&a, &intmat::transpose2(&d));
    if adt != [[m, 0], [0, m]] {
        return Err(defect("A·Dᵀ ≠ m·I"));
    }
    let pi = p as i128;
    let alpha = p_power_exponent(d[0][0] as i128, pi).ok_or_else(|| defect("diagonal is not a p-power"))?;
    let beta = p_power_exponent(d[1][1] as i128, pi).ok_or_else(|| defect("diagonal is not a p-power"))?;
    Ok(BlockRep { matrix: SymplecticIntMatrix::new_unchecked(out, m), alpha, beta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cosets::{left_cosets, HnfKey, DEFAULT_CANDIDATE_BUDGET};
    use rand::SeedableRng;
    use sp4_core::symplectic::random_gamma;

    #[test]
    fn scalar_is_fixed() {
        let b = block_reduce(&intmat::scalar(3), 3, 2).unwrap();
        assert_eq!(*b.matrix.entries(), intmat::scalar(3));
        assert_eq!((b.alpha, b.beta), (1, 1));
    }

    #[test]
    fn hnf_representative_example() {
        let h = [[1, 1, 0, 0], [0, 3, 0, 0], [0, 0, 1, 2], [0, 0, 0, 3]];
        assert_eq!(similitude_of(&h), None);
        let b = block_reduce(&h, 3, 1).unwrap();
        assert_eq!(similitude_of(b.matrix.entries()), Some(3));
        assert_eq!(hnf(b.matrix.entries()).unwrap(), h);
    }

    #[test]
    fn whole_tables_reduce_after_scrambling() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for (p, r) in [(2u64, 1u32), (2, 2), (3, 2), (2, 3)] {
            let t = left_cosets(p, r, DEFAULT_CANDIDATE_BUDGET).unwrap();
            for (i, rep) in t.reps().iter().enumerate() {
                let g = random_gamma(&mut rng, 6);
                let scrambled = intmat::mul(&g, rep);
                let b = block_reduce(&scrambled, p, r).unwrap();
                assert_eq!(HnfKey::of(b.matrix.entries()).unwrap(), t.keys()[i]);
                assert_eq!((b.alpha, b.beta), t.satake_exponents(i));
            }
        }
    }
}
