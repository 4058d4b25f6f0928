//! Left cosets `Γ\S(m)` and their partition into double cosets.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use sp4_core::hnf::{hnf, p_power_exponent, snf_exponents};
use sp4_core::intmat::{self, snf2, IntMat2, IntMat4, J};

use crate::error::{HeckeError, Result};
use crate::label::{is_prime, DoubleCosetLabel};

pub const TABLE_FORMAT_VERSION: u32 = 1;
pub const DEFAULT_CANDIDATE_BUDGET: u128 = 5_000_000;

/// Upper triangle of an HNF; a complete invariant of the left coset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HnfKey(pub [u32; 10]);

impl HnfKey {
    pub fn from_hnf(h: &IntMat4) -> Self {
        let mut k = [0u32; 10];
        let mut idx = 0;
        for i in 0..4 {
            for j in i..4 {
                k[idx] = u32::try_from(h[i][j]).expect("HNF entry out of key range");
                idx += 1;
            }
        }
        HnfKey(k)
    }

    pub fn of(m: &IntMat4) -> Result<Self> {
        Ok(Self::from_hnf(&hnf(m)?))
    }

    pub fn to_matrix(&self) -> IntMat4 {
        let mut h = [[0i64; 4]; 4];
        let mut idx = 0;
        for i in 0..4 {
            for j in i..4 {
                h[i][j] = self.0[idx] as i64;
                idx += 1;
            }
        }
        h
    }

    /// Diagonal entries of the HNF.
    pub fn diagonal(&self) -> [u32; 4] {
        [self.0[0], self.0[4], self.0[7], self.0[9]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableKind {
    Full,
    Label { a: u32, b: u32 },
}

/// Coset representatives for `S(pʳ)` or one double coset inside it.
///
/// Each representative is a genuine element `(A B; 0 D)` of `S(pʳ)`, so that
/// products of representatives represent products of cosets; `keys` holds the
/// HNF of each representative.
#[derive(Debug, Clone)]
pub struct CosetTable {
    pub p: u64,
    pub r: u32,
    pub kind: TableKind,
    pub version: u32,
    reps: Vec<IntMat4>,
    keys: Vec<HnfKey>,
    labels: Vec<(u32, u32)>,
}

impl CosetTable {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn reps(&self) -> &[IntMat4] {
        &self.reps
    }

    pub fn keys(&self) -> &[HnfKey] {
        &self.keys
    }

    /// Double-coset label `(a, b)` of every representative.
    pub fn labels(&self) -> &[(u32, u32)] {
        &self.labels
    }

    pub fn similitude(&self) -> i64 {
        (self.p as i64).pow(self.r)
    }

    /// Satake exponents of representative `i`: the `p`-adic valuations of the
    /// lower-right diagonal of its HNF.
    pub fn satake_exponents(&self, i: usize) -> (u32, u32) {
        let d = self.keys[i].diagonal();
        let p = self.p as i128;
        (p_power_exponent(d[2] as i128, p).unwrap(), p_power_exponent(d[3] as i128, p).unwrap())
    }

    pub fn label_of(&self, i: usize) -> DoubleCosetLabel {
        let (a, b) = self.labels[i];
        DoubleCosetLabel { p: self.p, r: self.r, a, b }
    }

    pub(crate) fn from_parts(p: u64, r: u32, kind: TableKind, reps: Vec<IntMat4>) -> Result<Self> {
        let m = (p as i64).pow(r);
        let mut keys = Vec::with_capacity(reps.len());
        let mut labels = Vec::with_capacity(reps.len());
        for rep in &reps {
            keys.push(HnfKey::of(rep)?);
            labels.push(snf_exponents(rep, p as i64, r)?);
            debug_assert_eq!(sp4_core::similitude_of(rep), Some(m));
        }
        Ok(Self { p, r, kind, version: TABLE_FORMAT_VERSION, reps, keys, labels })
    }

    pub(crate) fn from_raw(
        p: u64,
        r: u32,
        kind: TableKind,
        reps: Vec<IntMat4>,
        keys: Vec<HnfKey>,
        labels: Vec<(u32, u32)>,
    ) -> Self {
        Self { p, r, kind, version: TABLE_FORMAT_VERSION, reps, keys, labels }
    }

    /// Checks the table invariants: distinct HNF keys, similitude `pʳ`, matching labels.
    pub fn validate(&self) -> Result<()> {
        let m = self.similitude();
        let mut seen = HashSet::with_capacity(self.keys.len());
        for (i, rep) in self.reps.iter().enumerate() {
            if sp4_core::similitude_of(rep) != Some(m) {
                return Err(HeckeError::Defect(format!("representative {i} is not in S({m})")));
            }
            if HnfKey::of(rep)? != self.keys[i] {
                return Err(HeckeError::Defect(format!("stale HNF key at {i}")));
            }
            if !seen.insert(self.keys[i]) {
                return Err(HeckeError::Defect(format!("duplicate coset at {i}")));
            }
            let lab = snf_exponents(rep, self.p as i64, self.r)?;
            if lab != self.labels[i] {
                return Err(HeckeError::Defect(format!("stale label at {i}")));
            }
            if let TableKind::Label { a, b } = self.kind {
                if lab != (a, b) {
                    return Err(HeckeError::Defect(format!("representative {i} has label {lab:?} in table ({a},{b})")));
                }
            }
        }
        Ok(())
    }
}

fn divisors(m: i64) -> Vec<i64> {
    (1..=m).filter(|d| m % d == 0).collect()
}

/// Upper triangular 2×2 HNFs `A = (a x; 0 d)` with `m·A⁻¹` integral.
fn admissible_a_blocks(m: i64) -> Vec<IntMat2> {
    let mut out = Vec::new();
    for &a in &divisors(m) {
        for &d in &divisors(m) {
            for x in 0..d {
                if (m as i128 * x as i128) % (a as i128 * d as i128) == 0 {
                    out.push([[a, x], [0, d]]);
                }
            }
        }
    }
    out
}

fn d_block(m: i64, a: &IntMat2) -> IntMat2 {
    let (aa, x, d) = (a[0][0], a[0][1], a[1][1]);
    [[m / aa, 0], [-(m / aa) * x / d, m / d]]
}

/// Number of left cosets in `Γ\S(m)`, from the block parametrization.
pub fn coset_count(m: i64) -> u128 {
    admissible_a_blocks(m)
        .iter()
        .map(|a| {
            let (_, dd, _) = snf2(&d_block(m, a));
            (dd[0] as u128).pow(2) * dd[1] as u128
        })
        .sum()
}

/// One genuine representative `(A B; 0 D) ∈ S(m)` per left coset.
pub fn block_representatives(m: i64, budget: u128) -> Result<Vec<IntMat4>> {
    let needed = coset_count(m);
    if needed > budget {
        return Err(HeckeError::Budget { what: format!("coset enumeration for m = {m}"), needed, budget });
    }
    let mut reps = Vec::with_capacity(needed as usize);
    for a in admissible_a_blocks(m) {
        let d = d_block(m, &a);
        let (u, dd, v) = snf2(&d);
        let ut_inv = intmat::transpose2(&intmat::inv_unimodular2(&u));
        let q = dd[1] / dd[0];
        for i in 0..dd[0] {
            for j in 0..dd[0] {
                for k in 0..dd[1] {
                    let ts: IntMat2 = [[i, j * q], [j, k]];
                    let b = intmat::mul2(&intmat::mul2(&ut_inv, &ts), &v);
                    reps.push(intmat::from_blocks(&a, &b, &[[0, 0], [0, 0]], &d));
                }
            }
        }
    }
    Ok(reps)
}

/// `Γ\S(pʳ)` with labels, via the block parametrization.
pub fn left_cosets(p: u64, r: u32, budget: u128) -> Result<CosetTable> {
    if !is_prime(p) {
        return Err(HeckeError::NotPrime(p));
    }
    let m = (p as i64).checked_pow(r).ok_or_else(|| HeckeError::Budget {
        what: format!("p^r for p = {p}, r = {r}"),
        needed: u128::MAX,
        budget,
    })?;
    let reps = block_representatives(m, budget)?;
    CosetTable::from_parts(p, r, TableKind::Full, reps)
}

/// Exhaustive search over all upper triangular HNF candidates with `p`-power
/// diagonal, keeping those with `H J Hᵀ ≡ 0 (mod pʳ)`. Independent of the block
/// parametrization; feasible only for small `(p, r)`.
pub fn exhaustive_coset_keys(p: u64, r: u32, budget: u128) -> Result<Vec<HnfKey>> {
    let p = p as i64;
    let m = p.pow(r);
    let mut exps = Vec::new();
    for a0 in 0..=r {
        for a1 in 0..=r {
            for a2 in 0..=r {
                for a3 in 0..=r {
                    if a0 + a1 + a2 + a3 == 2 * r {
                        exps.push([a0, a1, a2, a3]);
                    }
                }
            }
        }
    }
    let mut needed: u128 = 0;
    for e in &exps {
        let mut c: u128 = 1;
        for (col, &k) in e.iter().enumerate() {
            c *= (p as u128).pow(k * col as u32);
        }
        needed += c;
    }
    if needed > budget {
        return Err(HeckeError::Budget { what: format!("exhaustive HNF search for p^{r}"), needed, budget });
    }
    let mut out = Vec::new();
    for e in exps {
        let d: Vec<i64> = e.iter().map(|&k| p.pow(k)).collect();
        // Off-diagonal positions (i, j), i < j, entry in [0, d[j]).
        let pos = [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)];
        let ranges: Vec<i64> = pos.iter().map(|&(_, j)| d[j]).collect();
        let mut idx = [0i64; 6];
        'odometer: loop {
            let mut h = intmat::diag([d[0], d[1], d[2], d[3]]);
            for (t, &(i, j)) in pos.iter().enumerate() {
                h[i][j] = idx[t];
            }
            let g = intmat::mul(&intmat::mul(&h, &J), &intmat::transpose(&h));
            if g.iter().flatten().all(|x| x % m == 0) {
                out.push(HnfKey::from_hnf(&h));
            }
            for t in 0..6 {
                idx[t] += 1;
                if idx[t] < ranges[t] {
                    continue 'odometer;
                }
                idx[t] = 0;
            }
            break;
        }
    }
    out.sort();
    Ok(out)
}

/// Partition of a full table by double-coset label.
pub fn double_coset_split(table: &CosetTable) -> Result<BTreeMap<(u32, u32), CosetTable>> {
    if table.kind != TableKind::Full {
        return Err(HeckeError::InvalidLabel("double_coset_split needs a full table".into()));
    }
    let mut parts: BTreeMap<(u32, u32), Vec<usize>> = BTreeMap::new();
    for (i, &lab) in table.labels.iter().enumerate() {
        parts.entry(lab).or_default().push(i);
    }
    Ok(parts
        .into_iter()
        .map(|((a, b), idx)| {
            let t = CosetTable {
                p: table.p,
                r: table.r,
                kind: TableKind::Label { a, b },
                version: table.version,
                reps: idx.iter().map(|&i| table.reps[i]).collect(),
                keys: idx.iter().map(|&i| table.keys[i]).collect(),
                labels: idx.iter().map(|&i| table.labels[i]).collect(),
            };
            ((a, b), t)
        })
        .collect())
}

/// Isotropic-subspace count `(p+1)(p²+1)` of 2-planes in `F_p⁴`, the degree of `T(p)`.
pub fn isotropic_plane_count(p: u64) -> u128 {
    let p = p as u128;
    (p + 1) * (p * p + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_degrees() {
        assert_eq!(left_cosets(5, 0, 10).unwrap().len(), 1);
        for p in [2u64, 3, 5, 7] {
            let t = left_cosets(p, 1, DEFAULT_CANDIDATE_BUDGET).unwrap();
            assert_eq!(t.len() as u128, isotropic_plane_count(p));
            t.validate().unwrap();
        }
        assert_eq!(coset_count(4), 151);
        assert_eq!(coset_count(9), 1201);
        assert_eq!(coset_count(16), 11191);
    }

    #[test]
    fn exhaustive_oracle_agrees() {
        for (p, r) in [(2u64, 1u32), (3, 1), (2, 2), (5, 1), (3, 2), (2, 3)] {
            let t = left_cosets(p, r, DEFAULT_CANDIDATE_BUDGET).unwrap();
            let mut keys = t.keys().to_vec();
            keys.sort();
            let oracle = exhaustive_coset_keys(p, r, 1 << 32).unwrap();
            assert_eq!(keys, oracle, "p={p} r={r}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let err = left_cosets(2, 4, 1000).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn split_examples() {
        let t1 = left_cosets(2, 1, DEFAULT_CANDIDATE_BUDGET).unwrap();
        let parts = double_coset_split(&t1).unwrap();
        assert_eq!(parts.keys().copied().collect::<Vec<_>>(), vec![(0, 0)]);
        for p in [2u64, 3] {
            let t = left_cosets(p, 2, DEFAULT_CANDIDATE_BUDGET).unwrap();
            let parts = double_coset_split(&t).unwrap();
            let scalar = &parts[&(1, 1)];
            assert_eq!(scalar.len(), 1);
            assert_eq!(scalar.keys()[0].to_matrix(), intmat::scalar(p as i64));
            assert_eq!(parts.values().map(|x| x.len()).sum::<usize>(), t.len());
            for part in parts.values() {
                part.validate().unwrap();
            }
        }
    }

    #[test]
    fn composite_similitude() {
        assert_eq!(coset_count(6), 15 * 40);
        let reps = block_representatives(6, 10_000).unwrap();
        let keys: HashSet<HnfKey> = reps.iter().map(|m| HnfKey::of(m).unwrap()).collect();
        assert_eq!(keys.len(), 600);
        assert!(reps.iter().all(|m| sp4_core::similitude_of(m) == Some(6)));
    }
}
