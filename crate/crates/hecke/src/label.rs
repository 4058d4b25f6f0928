//! Double-coset labels and exact rational combinations of them.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{HeckeError, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `T^{(r)}_{a,b}(p)`, the double coset of `diag(pᵃ, pᵇ, p^{r−a}, p^{r−b})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DoubleCosetLabel {
    pub p: u64,
    pub r: u32,
    pub a: u32,
    pub b: u32,
}

impl DoubleCosetLabel {
    pub fn new(p: u64, r: u32, a: u32, b: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(HeckeError::NotPrime(p));
        }
        if a > b || 2 * b > r {
            return Err(HeckeError::InvalidLabel(format!("need 0 <= a <= b <= r/2, got r={r}, a={a}, b={b}")));
        }
        Ok(Self { p, r, a, b })
    }

    /// The scalar `T^{(2c)}_{c,c}` (multiplication by `pᶜ`).
    pub fn scalar(p: u64, c: u32) -> Self {
        Self { p, r: 2 * c, a: c, b: c }
    }

    pub fn is_scalar(&self) -> bool {
        self.a == self.b && self.r == 2 * self.a
    }

    /// `(r − 2a, 0, b − a)` together with the removed scalar power `a`.
    pub fn primitive_part(&self) -> (Self, u32) {
        (Self { p: self.p, r: self.r - 2 * self.a, a: 0, b: self.b - self.a }, self.a)
    }

    pub fn shifted(&self, c: u32) -> Self {
        Self { p: self.p, r: self.r + 2 * c, a: self.a + c, b: self.b + c }
    }

    /// All labels of degree `r`, ordered by `(a, b)`.
    pub fn all(p: u64, r: u32) -> Vec<Self> {
        let mut out = Vec::new();
        for a in 0..=r / 2 {
            for b in a..=r / 2 {
                out.push(Self { p, r, a, b });
            }
        }
        out
    }

    pub fn diagonal_representative(&self) -> sp4_core::IntMat4 {
        let p = self.p as i64;
        sp4_core::intmat::diag([p.pow(self.a), p.pow(self.b), p.pow(self.r - self.a), p.pow(self.r - self.b)])
    }
}

impl fmt::Display for DoubleCosetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T^({})_{{{},{}}}({})", self.r, self.a, self.b, self.p)
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Finite rational combination of double cosets at a fixed prime. Zero
/// coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeckeElement {
    pub p: u64,
    terms: BTreeMap<DoubleCosetLabel, BigRational>,
}

impl HeckeElement {
    pub fn zero(p: u64) -> Self {
        Self { p, terms: BTreeMap::new() }
    }

    pub fn identity(p: u64) -> Self {
        Self::from_label(DoubleCosetLabel::scalar(p, 0))
    }

    pub fn from_label(label: DoubleCosetLabel) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(label, BigRational::one());
        Self { p: label.p, terms }
    }

    /// `T(pʳ) = Σ_{a ≤ b ≤ r/2} T^{(r)}_{a,b}`.
    pub fn t_p_power(p: u64, r: u32) -> Self {
        let mut e = Self::zero(p);
        for l in DoubleCosetLabel::all(p, r) {
            e.add_term(l, BigRational::one());
        }
        e
    }

    /// `Δᶜ = T^{(2c)}_{c,c}`.
    pub fn scalar_power(p: u64, c: u32) -> Self {
        Self::from_label(DoubleCosetLabel::scalar(p, c))
    }

    pub fn from_terms<I: IntoIterator<Item = (DoubleCosetLabel, BigRational)>>(p: u64, it: I) -> Result<Self> {
        let mut e = Self::zero(p);
        for (l, c) in it {
            if l.p != p {
                return Err(HeckeError::PrimeMismatch(p, l.p));
            }
            e.add_term(l, c);
        }
        Ok(e)
    }

    pub fn add_term(&mut self, label: DoubleCosetLabel, coeff: BigRational) {
        debug_assert_eq!(label.p, self.p);
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(label).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&label);
        }
    }

    pub fn terms(&self) -> &BTreeMap<DoubleCosetLabel, BigRational> {
        &self.terms
    }

    pub fn coefficient(&self, label: &DoubleCosetLabel) -> BigRational {
        self.terms.get(label).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|l| l.r).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(HeckeError::PrimeMismatch(self.p, other.p));
        }
        let mut out = self.clone();
        for (l, c) in &other.terms {
            out.add_term(*l, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        let mut out = Self::zero(self.p);
        for (l, c) in &self.terms {
            out.add_term(*l, c * s);
        }
        out
    }

    /// Multiplication by `Δᶜ`, which shifts every label.
    pub fn shift(&self, c: u32) -> Self {
        let mut out = Self::zero(self.p);
        for (l, v) in &self.terms {
            out.add_term(l.shifted(c), v.clone());
        }
        out
    }

    /// Image in the quotient where every scalar `T^{(2a)}_{a,a}` acts as the identity.
    pub fn normalized(&self) -> Self {
        let mut out = Self::zero(self.p);
        for (l, v) in &self.terms {
            out.add_term(l.primitive_part().0, v.clone());
        }
        out
    }

    /// Labels where `self` exceeds `other` coefficientwise, with both values.
    pub fn excess_over(&self, other: &Self) -> Vec<(DoubleCosetLabel, BigRational, BigRational)> {
        let mut labels: Vec<_> = self.terms.keys().chain(other.terms.keys()).copied().collect();
        labels.sort();
        labels.dedup();
        labels
            .into_iter()
            .filter_map(|l| {
                let (a, b) = (self.coefficient(&l), other.coefficient(&l));
                (a > b).then_some((l, a, b))
            })
            .collect()
    }

    /// `self ≤ other` coefficientwise.
    pub fn leq(&self, other: &Self) -> bool {
        self.excess_over(other).is_empty()
    }

    pub fn has_nonnegative_coefficients(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// CSV with columns `p,r,a,b,numerator,denominator`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("p,r,a,b,numerator,denominator\n");
        for (l, c) in &self.terms {
            s.push_str(&format!("{},{},{},{},{},{}\n", l.p, l.r, l.a, l.b, c.numer(), c.denom()));
        }
        s
    }
}

impl fmt::Display for HeckeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(l, c)| format!("({c})·{l}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}
