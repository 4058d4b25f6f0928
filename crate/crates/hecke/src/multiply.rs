//! Exact multiplication of Hecke operators from coset representatives.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sp4_core::hnf::snf_exponents;
use sp4_core::intmat::{self, IntMat4};
use sp4_core::symplectic::random_gamma;

use crate::cache::{CacheStatus, CosetCache};
use crate::cosets::{coset_count, double_coset_split, left_cosets, CosetTable, HnfKey, DEFAULT_CANDIDATE_BUDGET};
use crate::error::{HeckeError, Result};
use crate::label::{int, is_prime, DoubleCosetLabel, HeckeElement};

pub const DEFAULT_PRODUCT_BUDGET: u128 = 50_000_000;
const CONSTANCY_SAMPLES: usize = 2;
const BUCKET_PREFERRED: u128 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budgets {
    /// Maximum number of cosets enumerated per table.
    pub candidates: u128,
    /// Maximum number of matrix products per multiplication.
    pub products: u128,
}

impl Default for Budgets {
    fn default() -> Self {
        Self { candidates: DEFAULT_CANDIDATE_BUDGET, products: DEFAULT_PRODUCT_BUDGET }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductMethod {
    /// A rescaling by a scalar double coset.
    Scalar,
    /// All products `A_j B_k` bucketed by HNF.
    Bucket,
    /// Multiplicity of one fixed coset per target double coset.
    FixedCoset,
}

#[derive(Debug, Clone)]
pub struct ProductRecord {
    pub left: String,
    pub right: String,
    pub method: ProductMethod,
    pub work: u128,
}

/// Where a full table came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableSource {
    Cache,
    /// Enumerated; the flag records whether a corrupt cache file was discarded.
    Enumerated { discarded_corrupt: bool },
}

/// Hecke algebra at one prime: coset tables, the product rule and a memo of
/// products of primitive double cosets.
pub struct HeckeAlgebra {
    p: u64,
    budgets: Budgets,
    cache: Option<CosetCache>,
    full: HashMap<u32, Arc<CosetTable>>,
    parts: HashMap<(u32, u32, u32), Arc<CosetTable>>,
    memo: HashMap<(DoubleCosetLabel, DoubleCosetLabel), HeckeElement>,
    power_memo: HashMap<(u32, u32), HeckeElement>,
    records: Vec<ProductRecord>,
    table_log: Vec<(u32, TableSource)>,
}

impl HeckeAlgebra {
    pub fn new(p: u64, budgets: Budgets) -> Result<Self> {
        if !is_prime(p) {
            return Err(HeckeError::NotPrime(p));
        }
        Ok(Self {
            p,
            budgets,
            cache: None,
            full: HashMap::new(),
            parts: HashMap::new(),
            memo: HashMap::new(),
            power_memo: HashMap::new(),
            records: Vec::new(),
            table_log: Vec::new(),
        })
    }

    pub fn with_cache(mut self, cache: CosetCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn budgets(&self) -> Budgets {
        self.budgets
    }

    pub fn records(&self) -> &[ProductRecord] {
        &self.records
    }

    pub fn table_log(&self) -> &[(u32, TableSource)] {
        &self.table_log
    }

    /// Whether the table for `T(pʳ)` fits the candidate budget.
    pub fn table_feasible(&self, r: u32) -> bool {
        match (self.p as i64).checked_pow(r) {
            Some(m) if m < (1 << 40) => coset_count(m) <= self.budgets.candidates,
            _ => false,
        }
    }

    pub fn full_table(&mut self, r: u32) -> Result<Arc<CosetTable>> {
        if let Some(t) = self.full.get(&r) {
            return Ok(t.clone());
        }
        let mut discarded_corrupt = false;
        let mut table = None;
        if let Some(cache) = &self.cache {
            let (t, status) = cache.load(self.p, r)?;
            discarded_corrupt = status == CacheStatus::Corrupt;
            table = t;
        }
        let source = if table.is_some() { TableSource::Cache } else { TableSource::Enumerated { discarded_corrupt } };
        let table = match table {
            Some(t) => t,
            None => {
                let t = left_cosets(self.p, r, self.budgets.candidates)?;
                if let Some(cache) = &self.cache {
                    cache.store(&t)?;
                }
                t
            }
        };
        self.table_log.push((r, source));
        let table = Arc::new(table);
        for ((a, b), part) in double_coset_split(&table)? {
            self.parts.insert((r, a, b), Arc::new(part));
        }
        self.full.insert(r, table.clone());
        Ok(table)
    }

    /// Left cosets of one double coset; an empty table means the label does not occur.
    pub fn label_table(&mut self, label: &DoubleCosetLabel) -> Result<Arc<CosetTable>> {
        self.check_prime(label)?;
        self.full_table(label.r)?;
        self.parts
            .get(&(label.r, label.a, label.b))
            .cloned()
            .ok_or_else(|| HeckeError::Defect(format!("double coset {label} has no cosets")))
    }

    pub fn degree(&mut self, label: &DoubleCosetLabel) -> Result<usize> {
        Ok(self.label_table(label)?.len())
    }

    fn check_prime(&self, label: &DoubleCosetLabel) -> Result<()> {
        if label.p != self.p {
            return Err(HeckeError::PrimeMismatch(self.p, label.p));
        }
        Ok(())
    }

    /// `T1 · T2`, expanded bilinearly over double cosets.
    pub fn hecke_multiply(&mut self, t1: &HeckeElement, t2: &HeckeElement) -> Result<HeckeElement> {
        if t1.p != self.p || t2.p != self.p {
            return Err(HeckeError::PrimeMismatch(t1.p, t2.p));
        }
        let mut out = HeckeElement::zero(self.p);
        for (l1, c1) in t1.terms() {
            for (l2, c2) in t2.terms() {
                let prod = self.multiply_labels(l1, l2)?;
                out = out.add(&prod.scale(&(c1 * c2)))?;
            }
        }
        Ok(out)
    }

    pub fn multiply_labels(&mut self, l1: &DoubleCosetLabel, l2: &DoubleCosetLabel) -> Result<HeckeElement> {
        self.check_prime(l1)?;
        self.check_prime(l2)?;
        let (q1, c1) = l1.primitive_part();
        let (q2, c2) = l2.primitive_part();
        let shift = c1 + c2;
        if q1.r == 0 || q2.r == 0 {
            let q = if q1.r == 0 { q2 } else { q1 };
            self.records.push(ProductRecord {
                left: l1.to_string(),
                right: l2.to_string(),
                method: ProductMethod::Scalar,
                work: 0,
            });
            return Ok(HeckeElement::from_label(q).shift(shift));
        }
        let key = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
        if let Some(e) = self.memo.get(&key) {
            return Ok(e.shift(shift));
        }
        let prod = self.primitive_product(&key.0, &key.1)?;
        self.memo.insert(key, prod.clone());
        Ok(prod.shift(shift))
    }

    /// Product of two primitive labels in the given order, bypassing the memo.
    pub fn primitive_product(&mut self, la: &DoubleCosetLabel, lb: &DoubleCosetLabel) -> Result<HeckeElement> {
        let feasible_a = self.table_feasible(la.r);
        let feasible_b = self.table_feasible(lb.r);
        if feasible_a && feasible_b {
            let ta = self.label_table(la)?;
            let tb = self.label_table(lb)?;
            let work = ta.len() as u128 * tb.len() as u128;
            let targets = DoubleCosetLabel::all(self.p, la.r + lb.r).len() as u128;
            let fixed_work = targets * (1 + CONSTANCY_SAMPLES as u128) * ta.len().min(tb.len()) as u128;
            // Bucketing also checks degree completeness, so it is preferred while affordable.
            if work <= self.budgets.products && (work <= BUCKET_PREFERRED || work <= fixed_work) {
                let e = self.bucket_product(la, lb, &ta, &tb)?;
                self.records.push(ProductRecord {
                    left: la.to_string(),
                    right: lb.to_string(),
                    method: ProductMethod::Bucket,
                    work,
                });
                return Ok(e);
            }
            // Count against the smaller table.
            if ta.len() < tb.len() {
                return self.fixed_coset_product(lb, la, &ta);
            }
            return self.fixed_coset_product(la, lb, &tb);
        }
        if feasible_b {
            let tb = self.label_table(lb)?;
            return self.fixed_coset_product(la, lb, &tb);
        }
        if feasible_a {
            let ta = self.label_table(la)?;
            return self.fixed_coset_product(lb, la, &ta);
        }
        Err(HeckeError::Budget {
            what: format!("coset tables for {la} and {lb}"),
            needed: u128::MAX,
            budget: self.budgets.candidates,
        })
    }

    fn bucket_product(
        &mut self,
        la: &DoubleCosetLabel,
        lb: &DoubleCosetLabel,
        ta: &CosetTable,
        tb: &CosetTable,
    ) -> Result<HeckeElement> {
        let r = la.r + lb.r;
        let mut counts: HashMap<HnfKey, u64> = HashMap::new();
        for a in ta.reps() {
            for b in tb.reps() {
                let prod = intmat::try_mul(a, b)?;
                *counts.entry(HnfKey::of(&prod)?).or_insert(0) += 1;
            }
        }
        let mut per_label: BTreeMap<(u32, u32), (u64, usize)> = BTreeMap::new();
        let context = format!("{la} · {lb}");
        for (key, &c) in &counts {
            let lab = snf_exponents(&key.to_matrix(), self.p as i64, r)?;
            let entry = per_label.entry(lab).or_insert((c, 0));
            if entry.0 != c {
                return Err(HeckeError::Multiplicity {
                    context,
                    label: DoubleCosetLabel { p: self.p, r, a: lab.0, b: lab.1 },
                    first: entry.0,
                    second: c,
                });
            }
            entry.1 += 1;
        }
        let known_degrees = self.full.contains_key(&r);
        let mut out = HeckeElement::zero(self.p);
        for ((a, b), (c, n)) in per_label {
            let label = DoubleCosetLabel { p: self.p, r, a, b };
            if known_degrees {
                let deg = self.parts.get(&(r, a, b)).map(|t| t.len()).unwrap_or(0);
                if deg != n {
                    return Err(HeckeError::Defect(format!(
                        "{context}: {n} distinct cosets of {label} appear, its degree is {deg}"
                    )));
                }
            }
            out.add_term(label, int(c as i64));
        }
        Ok(out)
    }

    /// `T_A · T_B` from `c_D = #{k : D·B_k⁻¹ ∈ ΓAΓ}`, using only the table of `B`.
    fn fixed_coset_product(&mut self, la: &DoubleCosetLabel, lb: &DoubleCosetLabel, tb: &CosetTable) -> Result<HeckeElement> {
        let r = la.r + lb.r;
        let targets = DoubleCosetLabel::all(self.p, r);
        let work = (targets.len() * (1 + CONSTANCY_SAMPLES)) as u128 * tb.len() as u128;
        if work > self.budgets.products {
            return Err(HeckeError::Budget { what: format!("{la} · {lb}"), needed: work, budget: self.budgets.products });
        }
        let mb = (self.p as i64).pow(lb.r);
        let adjs: Vec<IntMat4> = tb.reps().iter().map(intmat::symplectic_adjoint).collect();
        let p = self.p as i64;
        let test = |q: &IntMat4| -> Result<bool> {
            if q.iter().flatten().any(|x| x % mb != 0) {
                return Ok(false);
            }
            let quotient = intmat::scale_div(q, mb);
            Ok(snf_exponents(&quotient, p, la.r)? == (la.a, la.b))
        };
        let context = format!("{la} · {lb}");
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ ((la.r as u64) << 32) ^ ((lb.r as u64) << 16) ^ self.p);
        let mut out = HeckeElement::zero(self.p);
        for target in targets {
            let counts = self.count_with_samples(&target, &adjs, &test, &mut rng)?;
            let c = counts[0];
            if let Some(&bad) = counts.iter().find(|&&x| x != c) {
                return Err(HeckeError::Multiplicity { context, label: target, first: c, second: bad });
            }
            out.add_term(target, int(c as i64));
        }
        self.records.push(ProductRecord {
            left: la.to_string(),
            right: lb.to_string(),
            method: ProductMethod::FixedCoset,
            work,
        });
        Ok(out)
    }

    fn count_with_samples<F>(&self, target: &DoubleCosetLabel, adjs: &[IntMat4], test: &F, rng: &mut ChaCha8Rng) -> Result<Vec<u64>>
    where
        F: Fn(&IntMat4) -> Result<bool>,
    {
        let d0 = target.diagonal_representative();
        let mut reps = vec![d0];
        for _ in 0..CONSTANCY_SAMPLES {
            let g1 = random_gamma(rng, 3);
            let g2 = random_gamma(rng, 3);
            reps.push(intmat::try_mul(&intmat::try_mul(&g1, &d0)?, &g2)?);
        }
        let mut counts = Vec::with_capacity(reps.len());
        for d in &reps {
            let mut c = 0u64;
            for adj in adjs {
                if test(&intmat::try_mul(d, adj)?)? {
                    c += 1;
                }
            }
            counts.push(c);
        }
        Ok(counts)
    }

    /// `T(p^{r1}) · T(p^{r2})` from `c_D = #{k : D·B_k⁻¹ integral}` over the smaller full table.
    pub fn t_power_product(&mut self, r1: u32, r2: u32) -> Result<HeckeElement> {
        let (big, small) = if r1 >= r2 { (r1, r2) } else { (r2, r1) };
        if let Some(e) = self.power_memo.get(&(big, small)) {
            return Ok(e.clone());
        }
        let table = self.full_table(small)?;
        let r = r1 + r2;
        let targets = DoubleCosetLabel::all(self.p, r);
        let work = (targets.len() * (1 + CONSTANCY_SAMPLES)) as u128 * table.len() as u128;
        if work > self.budgets.products {
            return Err(HeckeError::Budget {
                what: format!("T(p^{r1})·T(p^{r2})"),
                needed: work,
                budget: self.budgets.products,
            });
        }
        let ms = (self.p as i64).pow(small);
        let adjs: Vec<IntMat4> = table.reps().iter().map(intmat::symplectic_adjoint).collect();
        let test = |q: &IntMat4| -> Result<bool> { Ok(q.iter().flatten().all(|x| x % ms == 0)) };
        let mut rng = ChaCha8Rng::seed_from_u64(0xfeed ^ ((big as u64) << 32) ^ ((small as u64) << 16) ^ self.p);
        let mut out = HeckeElement::zero(self.p);
        let context = format!("T(p^{r1})·T(p^{r2})");
        for target in targets {
            let counts = self.count_with_samples(&target, &adjs, &test, &mut rng)?;
            let c = counts[0];
            if let Some(&bad) = counts.iter().find(|&&x| x != c) {
                return Err(HeckeError::Multiplicity { context, label: target, first: c, second: bad });
            }
            out.add_term(target, int(c as i64));
        }
        self.records.push(ProductRecord {
            left: format!("T(p^{r1})"),
            right: format!("T(p^{r2})"),
            method: ProductMethod::FixedCoset,
            work,
        });
        self.power_memo.insert((big, small), out.clone());
        Ok(out)
    }

    /// `T(pʳ)`, or `T(pʳ)` as a sum of labels when tables are not needed.
    pub fn t_p_power(&self, r: u32) -> HeckeElement {
        HeckeElement::t_p_power(self.p, r)
    }

    pub fn power(&mut self, t: &HeckeElement, n: u32) -> Result<HeckeElement> {
        let mut acc = HeckeElement::identity(self.p);
        for _ in 0..n {
            acc = self.hecke_multiply(&acc, t)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::rat;
    use num_rational::BigRational;

    fn alg(p: u64) -> HeckeAlgebra {
        HeckeAlgebra::new(p, Budgets::default()).unwrap()
    }

    #[test]
    fn square_of_t_p() {
        for p in [2u64, 3, 5] {
            let mut h = alg(p);
            let t = h.t_p_power(1);
            let sq = h.hecke_multiply(&t, &t).unwrap();
            let pi = p as i64;
            let expected = HeckeElement::from_terms(
                p,
                [
                    (DoubleCosetLabel::new(p, 2, 0, 0).unwrap(), int(1)),
                    (DoubleCosetLabel::new(p, 2, 0, 1).unwrap(), int(pi + 1)),
                    (DoubleCosetLabel::new(p, 2, 1, 1).unwrap(), int(pi * pi * pi + pi * pi + pi + 1)),
                ],
            )
            .unwrap();
            assert_eq!(sq, expected, "p = {p}");
        }
    }

    #[test]
    fn identity_is_neutral() {
        let mut h = alg(3);
        let t = HeckeElement::t_p_power(3, 2).scale(&rat(2, 3));
        assert_eq!(h.hecke_multiply(&t, &HeckeElement::identity(3)).unwrap(), t);
        assert_eq!(h.hecke_multiply(&HeckeElement::scalar_power(3, 1), &t).unwrap(), t.shift(1));
    }

    #[test]
    fn fixed_coset_agrees_with_bucket() {
        let mut h = alg(2);
        let l1 = DoubleCosetLabel::new(2, 2, 0, 0).unwrap();
        let l2 = DoubleCosetLabel::new(2, 3, 0, 1).unwrap();
        let bucket = h.multiply_labels(&l1, &l2).unwrap();
        let tb = h.label_table(&l1).unwrap();
        let fixed = h.fixed_coset_product(&l2, &l1, &tb).unwrap();
        assert_eq!(bucket, fixed);
    }

    #[test]
    fn t_power_product_agrees_with_bilinear() {
        let mut h = alg(2);
        let (a, b) = (h.t_p_power(2), h.t_p_power(3));
        let bilinear = h.hecke_multiply(&a, &b).unwrap();
        assert_eq!(h.t_power_product(2, 3).unwrap(), bilinear);
    }

    #[test]
    fn degrees_are_consistent_with_products() {
        // T(p)·T(p) has total degree 15² = 225 at p = 2.
        let mut h = alg(2);
        let t = h.t_p_power(1);
        let sq = h.hecke_multiply(&t, &t).unwrap();
        let mut total = BigRational::from_integer(0.into());
        for (l, c) in sq.terms() {
            total += c * int(h.degree(l).unwrap() as i64);
        }
        assert_eq!(total, int(225));
    }

    #[test]
    fn wrong_prime_is_rejected() {
        let mut h = alg(2);
        let t = HeckeElement::t_p_power(3, 1);
        assert!(matches!(h.hecke_multiply(&t, &t), Err(HeckeError::PrimeMismatch(..))));
    }
}
