//! The Satake map into Weyl-invariant polynomials in `x₀, x₁, x₂`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{HeckeError, Result};
use crate::label::{DoubleCosetLabel, HeckeElement};
use crate::multiply::HeckeAlgebra;

/// Exponents `(r, c₁, c₂)` of the monomial `x₀ʳ x₁^{c₁} x₂^{c₂}`.
pub type Monomial = (u32, i32, i32);

/// Finite rational combination of monomials `x₀ʳ x₁^{c₁} x₂^{c₂}`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SatakePolynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

fn p_pow(p: u64, e: i64) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(p));
    if e >= 0 {
        num_traits::pow(base, e as usize)
    } else {
        num_traits::pow(base.recip(), (-e) as usize)
    }
}

impl SatakePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial((0, 0, 0), BigRational::one())
    }

    pub fn monomial(m: Monomial, c: BigRational) -> Self {
        let mut s = Self::zero();
        s.add_term(m, c);
        s
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigRational> {
        &self.terms
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(*m, c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term((m1.0 + m2.0, m1.1 + m2.1, m1.2 + m2.2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Image under `(x₀, x₁, x₂) ↦ (x₀x₁, 1/x₁, x₂)`.
    pub fn flip_x1(&self) -> Self {
        let mut out = Self::zero();
        for (&(r, c1, c2), c) in &self.terms {
            out.add_term((r, r as i32 - c1, c2), c.clone());
        }
        out
    }

    /// Image under `(x₀, x₁, x₂) ↦ (x₀x₂, x₁, 1/x₂)`.
    pub fn flip_x2(&self) -> Self {
        let mut out = Self::zero();
        for (&(r, c1, c2), c) in &self.terms {
            out.add_term((r, c1, r as i32 - c2), c.clone());
        }
        out
    }

    pub fn swap(&self) -> Self {
        let mut out = Self::zero();
        for (&(r, c1, c2), c) in &self.terms {
            out.add_term((r, c2, c1), c.clone());
        }
        out
    }

    /// The three invariance conditions, in the order `x₁ ↔ x₂`, first and second automorphism.
    pub fn invariance(&self) -> [bool; 3] {
        [self.swap() == *self, self.flip_x1() == *self, self.flip_x2() == *self]
    }

    pub fn is_weyl_invariant(&self) -> bool {
        self.invariance().iter().all(|&b| b)
    }

    /// Monomials whose coefficients differ, with both coefficients.
    pub fn differences(&self, other: &Self) -> Vec<(Monomial, BigRational, BigRational)> {
        let keys: BTreeSet<Monomial> = self.terms.keys().chain(other.terms.keys()).copied().collect();
        keys.into_iter()
            .filter_map(|m| {
                let (a, b) = (self.coefficient(&m), other.coefficient(&m));
                (a != b).then_some((m, a, b))
            })
            .collect()
    }
}

impl fmt::Display for SatakePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.terms.iter().map(|((r, c1, c2), c)| format!("({c})·x0^{r}·x1^{c1}·x2^{c2}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The set `W_r(a₁, a₂)` of exponent pairs.
pub fn weyl_orbit(r: u32, a1: u32, a2: u32) -> BTreeSet<(i32, i32)> {
    let (r, a1, a2) = (r as i32, a1 as i32, a2 as i32);
    [
        (a1, a2),
        (a2, a1),
        (r - a1, a2),
        (a2, r - a1),
        (a1, r - a2),
        (r - a2, a1),
        (r - a1, r - a2),
        (r - a2, r - a1),
    ]
    .into_iter()
    .collect()
}

/// `x₀ʳ Σ_{(b₁,b₂) ∈ W_r(a₁,a₂)} x₁^{b₁} x₂^{b₂}`.
pub fn weyl_orbit_basis(r: u32, a1: u32, a2: u32) -> Result<SatakePolynomial> {
    if a1 > a2 || 2 * a2 > r {
        return Err(HeckeError::InvalidLabel(format!("need 0 <= a1 <= a2 <= r/2, got ({r}, {a1}, {a2})")));
    }
    let mut out = SatakePolynomial::zero();
    for (b1, b2) in weyl_orbit(r, a1, a2) {
        out.add_term((r, b1, b2), BigRational::one());
    }
    Ok(out)
}

/// Satake image of one double coset, summed over its left cosets.
pub fn satake_label(alg: &mut HeckeAlgebra, label: &DoubleCosetLabel) -> Result<SatakePolynomial> {
    let (prim, shift) = label.primitive_part();
    let p = alg.p();
    let mut out = SatakePolynomial::zero();
    if prim.r == 0 {
        out = SatakePolynomial::one();
    } else {
        let table = alg.label_table(&prim)?;
        let mut counts: BTreeMap<(u32, u32), u64> = BTreeMap::new();
        for i in 0..table.len() {
            *counts.entry(table.satake_exponents(i)).or_insert(0) += 1;
        }
        for ((alpha, beta), n) in counts {
            let c = BigRational::from_integer(BigInt::from(n)) * p_pow(p, -(alpha as i64) - 2 * beta as i64);
            out.add_term((prim.r, alpha as i32, beta as i32), c);
        }
    }
    Ok(out.mul(&delta_image(p).pow(shift)))
}

/// Image of the scalar double coset `T^{(2)}_{1,1}`: the single coset `p·I`.
pub fn delta_image(p: u64) -> SatakePolynomial {
    SatakePolynomial::monomial((2, 1, 1), p_pow(p, -3))
}

pub fn satake(alg: &mut HeckeAlgebra, t: &HeckeElement) -> Result<SatakePolynomial> {
    let mut out = SatakePolynomial::zero();
    for (l, c) in t.terms() {
        out = out.add(&satake_label(alg, l)?.scale(c));
    }
    Ok(out)
}

type Coeff = fn(i64) -> i64;

/// One entry `num(p)/p^k · x_r^{(a₁,a₂)}` of a reference row.
struct RowEntry {
    a1: u32,
    a2: u32,
    num: Coeff,
    den_pow: i64,
}

const fn e(a1: u32, a2: u32, num: Coeff, den_pow: i64) -> RowEntry {
    RowEntry { a1, a2, num, den_pow }
}

/// Which version of the reference rows to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableVariant {
    /// Coefficients as printed.
    Printed,
    /// With the entries listed by [`errata`] replaced.
    Corrected,
}

/// A printed coefficient that contradicts the `T(pʳ)T(p²)` relation.
#[derive(Debug, Clone, Serialize)]
pub struct Erratum {
    pub r: u32,
    pub b: u32,
    pub orbit: (u32, u32),
    pub printed: &'static str,
    pub corrected: &'static str,
}

pub fn errata() -> Vec<Erratum> {
    vec![
        Erratum { r: 4, b: 1, orbit: (0, 2), printed: "(p-1)/p", corrected: "(p-1)/p^2" },
        Erratum { r: 5, b: 1, orbit: (0, 2), printed: "(p-1)/p", corrected: "(p-1)/p^2" },
        Erratum { r: 5, b: 2, orbit: (2, 2), printed: "(p-1)(3p-1)/p^3", corrected: "(p-1)(3p-1)/p^4" },
    ]
}

fn row_entries(r: u32, b: u32, variant: TableVariant) -> Option<Vec<RowEntry>> {
    let fixed = variant == TableVariant::Corrected;
    let rows = match (r, b) {
        (1, 0) => vec![e(0, 0, |_| 1, 0)],
        (2, 0) => vec![e(0, 0, |_| 1, 0), e(0, 1, |p| p - 1, 1), e(1, 1, |p| 2 * (p - 1), 1)],
        (2, 1) => vec![e(0, 1, |_| 1, 1), e(1, 1, |p| p * p - 1, 3)],
        (3, 0) => vec![e(0, 0, |_| 1, 0), e(0, 1, |p| p - 1, 1), e(1, 1, |p| (p - 1) * (2 * p - 1), 2)],
        (3, 1) => vec![e(0, 1, |_| 1, 1), e(1, 1, |p| (p - 1) * (2 * p + 1), 3)],
        (4, 0) => vec![
            e(0, 0, |_| 1, 0),
            e(0, 1, |p| p - 1, 1),
            e(0, 2, |p| p - 1, 1),
            e(1, 1, |p| (p - 1) * (2 * p - 1), 2),
            e(1, 2, |p| 2 * (p - 1) * (p - 1), 2),
            e(2, 2, |p| (p - 1) * (3 * p * p - 2 * p + 1), 3),
        ],
        (4, 1) => vec![
            e(0, 1, |_| 1, 1),
            e(0, 2, |p| p - 1, if fixed { 2 } else { 1 }),
            e(1, 1, |p| 2 * (p - 1), 2),
            e(1, 2, |p| 3 * (p - 1), 2),
            e(2, 2, |p| (p - 1) * (p - 1) * (3 * p + 1), 4),
        ],
        (4, 2) => vec![
            e(0, 2, |_| 1, 2),
            e(1, 1, |p| p - 1, 3),
            e(1, 2, |p| p - 1, 3),
            e(2, 2, |p| 2 * (p - 1), 3),
        ],
        (5, 0) => vec![
            e(0, 0, |_| 1, 0),
            e(0, 1, |p| p - 1, 1),
            e(0, 2, |p| p - 1, 1),
            e(1, 1, |p| (p - 1) * (2 * p - 1), 2),
            e(1, 2, |p| 2 * (p - 1) * (p - 1), 2),
            e(2, 2, |p| (p - 1) * (3 * p * p - 3 * p + 1), 3),
        ],
        (5, 1) => vec![
            e(0, 1, |_| 1, 1),
            e(0, 2, |p| p - 1, if fixed { 2 } else { 1 }),
            e(1, 1, |p| 2 * (p - 1), 2),
            e(1, 2, |p| (3 * p - 1) * (p - 1), 3),
            e(2, 2, |p| (p - 1) * (4 * p - 3), 3),
        ],
        (5, 2) => vec![
            e(0, 2, |_| 1, 2),
            e(1, 1, |p| p - 1, 3),
            e(1, 2, |p| 2 * (p - 1), 3),
            e(2, 2, |p| (p - 1) * (3 * p - 1), if fixed { 4 } else { 3 }),
        ],
        (6, 0) => vec![
            e(0, 0, |_| 1, 0),
            e(0, 1, |p| p - 1, 1),
            e(0, 2, |p| p - 1, 1),
            e(0, 3, |p| p - 1, 1),
            e(1, 1, |p| (p - 1) * (2 * p - 1), 2),
            e(1, 2, |p| 2 * (p - 1) * (p - 1), 2),
            e(1, 3, |p| 2 * (p - 1) * (p - 1), 2),
            e(2, 2, |p| (p - 1) * (3 * p * p - 3 * p + 1), 3),
            e(2, 3, |p| (p - 1) * (p - 1) * (3 * p - 1), 3),
            e(3, 3, |p| 2 * (p - 1) * (2 * p * p - 2 * p + 1), 3),
        ],
        (6, 1) => vec![
            e(0, 1, |_| 1, 1),
            e(0, 2, |p| p - 1, 2),
            e(0, 3, |p| p - 1, 2),
            e(1, 1, |p| 2 * (p - 1), 2),
            e(1, 2, |p| (p - 1) * (3 * p - 1), 3),
            e(1, 3, |p| (p - 1) * (3 * p - 2), 3),
            e(2, 2, |p| 4 * (p - 1) * (p - 1), 3),
            e(2, 3, |p| (p - 1) * (5 * p * p - 4 * p + 1), 4),
            e(3, 3, |p| (p - 1) * (p - 1) * (5 * p - 1), 4),
        ],
        _ => return None,
    };
    Some(rows)
}

/// Labels `(r, b)` of the primitive double cosets `T^{(r)}_{0,b}` with a reference polynomial.
pub fn reference_rows() -> Vec<(u32, u32)> {
    vec![(1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (4, 0), (4, 1), (4, 2), (5, 0), (5, 1), (5, 2), (6, 0), (6, 1)]
}

/// Reference Satake image of `T^{(r)}_{0,b}(p)` in the Weyl orbit basis.
pub fn reference_row(p: u64, r: u32, b: u32, variant: TableVariant) -> Option<SatakePolynomial> {
    let entries = row_entries(r, b, variant)?;
    let mut out = SatakePolynomial::zero();
    for en in entries {
        let c = BigRational::from_integer(BigInt::from((en.num)(p as i64))) * p_pow(p, -en.den_pow);
        let basis = weyl_orbit_basis(r, en.a1, en.a2).expect("reference rows use valid orbits");
        out = out.add(&basis.scale(&c));
    }
    Some(out)
}

/// Satake image of `t` computed from the reference rows alone, or `None` if
/// some primitive label has no reference row.
pub fn satake_from_reference(t: &HeckeElement, variant: TableVariant) -> Option<SatakePolynomial> {
    let mut out = SatakePolynomial::zero();
    for (l, c) in t.terms() {
        let (q, shift) = l.primitive_part();
        let base = if q.r == 0 { SatakePolynomial::one() } else { reference_row(t.p, q.r, q.b, variant)? };
        out = out.add(&base.mul(&delta_image(t.p).pow(shift)).scale(c));
    }
    Some(out)
}

/// Whether the reference rows satisfy `S(T(pʳ))·S(T(p²)) = S(T(pʳ)T(p²))`, with the
/// product expanded by the closed formula, for `r ≥ 2`.
pub fn reference_rows_consistent(p: u64, r: u32, variant: TableVariant) -> Option<bool> {
    let lhs = satake_from_reference(&HeckeElement::t_p_power(p, r), variant)?
        .mul(&satake_from_reference(&HeckeElement::t_p_power(p, 2), variant)?);
    let rhs = satake_from_reference(&crate::identities::kodama_rhs(p, r), variant)?;
    Some(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::rat;
    use crate::multiply::Budgets;

    fn alg(p: u64) -> HeckeAlgebra {
        HeckeAlgebra::new(p, Budgets::default()).unwrap()
    }

    #[test]
    fn orbit_examples() {
        let w = weyl_orbit_basis(1, 0, 0).unwrap();
        assert_eq!(w.terms().len(), 4);
        assert_eq!(weyl_orbit_basis(2, 1, 1).unwrap().terms().len(), 1);
        assert!(weyl_orbit(4, 0, 2).len() <= 8);
        assert_eq!(weyl_orbit(4, 0, 2).len(), 4);
        assert!(weyl_orbit_basis(3, 1, 0).is_err());
    }

    #[test]
    fn t_p_image() {
        let mut h = alg(2);
        let s = satake_label(&mut h, &DoubleCosetLabel::new(2, 1, 0, 0).unwrap()).unwrap();
        assert_eq!(s, weyl_orbit_basis(1, 0, 0).unwrap().scale(&rat(1, 1)));
        assert_eq!(satake(&mut h, &HeckeElement::identity(2)).unwrap(), SatakePolynomial::one());
    }

    #[test]
    fn low_rows_match() {
        for p in [2u64, 3] {
            let mut h = alg(p);
            for (r, b) in [(1, 0), (2, 0), (2, 1), (3, 0), (3, 1)] {
                let s = satake_label(&mut h, &DoubleCosetLabel::new(p, r, 0, b).unwrap()).unwrap();
                assert_eq!(s, reference_row(p, r, b, TableVariant::Printed).unwrap(), "p={p} r={r} b={b}");
                assert!(s.is_weyl_invariant());
            }
        }
    }

    #[test]
    fn errata_are_forced_by_the_product_formula() {
        for p in [2u64, 3, 5, 7, 11] {
            for r in [2u32, 3] {
                assert_eq!(reference_rows_consistent(p, r, TableVariant::Printed), Some(false));
                assert_eq!(reference_rows_consistent(p, r, TableVariant::Corrected), Some(true));
            }
            assert_eq!(reference_rows_consistent(p, 4, TableVariant::Corrected), None);
        }
    }

    #[test]
    fn corrected_rows_match_up_to_degree_four() {
        let mut h = alg(2);
        for (r, b) in reference_rows().into_iter().filter(|&(r, _)| r <= 4) {
            let s = satake_label(&mut h, &DoubleCosetLabel::new(2, r, 0, b).unwrap()).unwrap();
            assert_eq!(s, reference_row(2, r, b, TableVariant::Corrected).unwrap(), "r={r} b={b}");
        }
    }

    #[test]
    fn scalar_images_are_consistent() {
        let mut h = alg(3);
        let direct = {
            let t = h.label_table(&DoubleCosetLabel::new(3, 4, 1, 2).unwrap()).unwrap();
            let mut s = SatakePolynomial::zero();
            for i in 0..t.len() {
                let (a, b) = t.satake_exponents(i);
                s.add_term((4, a as i32, b as i32), p_pow(3, -(a as i64) - 2 * b as i64));
            }
            s
        };
        let via_shift = satake_label(&mut h, &DoubleCosetLabel::new(3, 4, 1, 2).unwrap()).unwrap();
        assert_eq!(direct, via_shift);
    }
}
