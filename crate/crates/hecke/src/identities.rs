//! Hecke relations and coefficientwise bounds at one prime, checked exactly.
//!
//! All elements live in the graded algebra: the scalar double coset
//! `Δ = T^{(2)}_{1,1}` is kept as a label of degree two, so that every
//! relation is homogeneous.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::cosets::{block_representatives, coset_count, HnfKey};
use crate::error::Result;
use crate::label::{int, DoubleCosetLabel, HeckeElement};
use crate::multiply::HeckeAlgebra;

#[derive(Debug, Clone, Serialize)]
pub struct CoefficientMismatch {
    pub label: String,
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub mismatches: Vec<CoefficientMismatch>,
}

impl CheckResult {
    fn equality(name: impl Into<String>, lhs: &HeckeElement, rhs: &HeckeElement) -> Self {
        let diff = lhs.sub(rhs).expect("same prime");
        let mismatches: Vec<_> = diff
            .terms()
            .keys()
            .map(|l| CoefficientMismatch {
                label: l.to_string(),
                left: lhs.coefficient(l).to_string(),
                right: rhs.coefficient(l).to_string(),
            })
            .collect();
        Self { name: name.into(), passed: mismatches.is_empty(), detail: format!("lhs = {lhs}"), mismatches }
    }

    fn inequality(name: impl Into<String>, lhs: &HeckeElement, rhs: &HeckeElement) -> Self {
        let mismatches: Vec<_> = lhs
            .excess_over(rhs)
            .into_iter()
            .map(|(l, a, b)| CoefficientMismatch { label: l.to_string(), left: a.to_string(), right: b.to_string() })
            .collect();
        Self { name: name.into(), passed: mismatches.is_empty(), detail: format!("lhs = {lhs}"), mismatches }
    }
}

/// One coefficient of `T(pʳ)² = Σ c_{r,b,s} T^{(2s)}_{0,b} Δ^{r−s}`.
#[derive(Debug, Clone, Serialize)]
pub struct SquareCoefficient {
    pub r: u32,
    pub b: u32,
    pub s: u32,
    pub c: String,
    /// `|c| / p^{3r−2s}`.
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub p: u64,
    pub rmax: u32,
    pub checks: Vec<CheckResult>,
    pub square_coefficients: Vec<SquareCoefficient>,
    /// Largest ratio `|c_{r,b,s}| / p^{3r−2s}` over the computed squares.
    pub square_constant: f64,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn lab(p: u64, r: u32, a: u32, b: u32) -> DoubleCosetLabel {
    DoubleCosetLabel { p, r, a, b }
}

fn pw(p: u64, e: u32) -> i64 {
    (p as i64).pow(e)
}

/// Right hand side of `T(pʳ)T(p²)` as a sum of double cosets, for `r ≥ 2`.
pub fn kodama_rhs(p: u64, r: u32) -> HeckeElement {
    let pi = p as i64;
    let mut e = HeckeElement::zero(p);
    let n = r + 2;
    e.add_term(lab(p, n, 0, 0), int(1));
    e.add_term(lab(p, n, 0, 1), int(pi + 1));
    for b in 2..=n / 2 {
        e.add_term(lab(p, n, 0, b), int(pi * pi + pi + 1));
    }
    e.add_term(lab(p, n, 1, 1), int(pi.pow(3) + pi * pi + pi + 1));
    for b in 1..=r / 2 {
        e.add_term(lab(p, n, 1, b + 1), int(pi.pow(4) + 2 * pi.pow(3) + pi * pi + pi + 1));
    }
    let c = pi.pow(6) + pi.pow(5) + 2 * pi.pow(4) + 2 * pi.pow(3) + pi * pi + pi + 1;
    for a in 1..=r / 2 {
        for b in 0..=(r - 2 * a) / 2 {
            e.add_term(lab(p, n, a + 1, a + 1 + b), int(c));
        }
    }
    e
}

/// `T(p)² = T^{(2)}_{0,0} + (p+1)T^{(2)}_{0,1} + (p³+p²+p+1)Δ`.
pub fn square_rhs(p: u64) -> HeckeElement {
    let pi = p as i64;
    let mut e = HeckeElement::zero(p);
    e.add_term(lab(p, 2, 0, 0), int(1));
    e.add_term(lab(p, 2, 0, 1), int(pi + 1));
    e.add_term(lab(p, 2, 1, 1), int(pi.pow(3) + pi * pi + pi + 1));
    e
}

/// `Σ_{b ≤ s} T^{(2s)}_{0,b} Δᶜ`.
fn a0_sum(p: u64, s: u32, shift: u32) -> HeckeElement {
    let mut e = HeckeElement::zero(p);
    for b in 0..=s {
        e.add_term(lab(p, 2 * s + 2 * shift, shift, b + shift), int(1));
    }
    e
}

/// The three successive upper bounds for `T(p^{2r+2})`.
pub fn kodamanew_bounds(p: u64, r: u32) -> [HeckeElement; 2] {
    let mut x3 = HeckeElement::zero(p);
    x3 = x3.add(&a0_sum(p, r + 1, 0).scale(&int(3 * pw(p, 2)))).unwrap();
    x3 = x3.add(&a0_sum(p, r, 1).scale(&int(6 * pw(p, 4)))).unwrap();
    for a in 1..=r {
        x3 = x3.add(&a0_sum(p, r - a, a + 1).scale(&int(9 * pw(p, 6)))).unwrap();
    }
    let mut x4 = HeckeElement::zero(p);
    for s in 0..=r + 1 {
        x4 = x4.add(&a0_sum(p, s, r + 1 - s).scale(&int(10 * pw(p, 2 * r + 4 - 2 * s)))).unwrap();
    }
    [x3, x4]
}

/// `Σ_{τ ≤ 4} w(τ)·p^{12−2τ} Σ_{b ≤ τ} T^{(2τ)}_{0,b} Δ^{4−τ}` with `w(τ) = 100·#{s ≤ 3 : τ ≤ s+1}`.
fn square4_tail(p: u64, collapsed: bool) -> HeckeElement {
    let mut e = HeckeElement::zero(p);
    for tau in 0..=4u32 {
        let w = if collapsed { 400 } else { 100 * (0..=3u32).filter(|&s| tau <= s + 1).count() as i64 };
        e = e.add(&a0_sum(p, tau, 4 - tau).scale(&int(w * pw(p, 12 - 2 * tau)))).unwrap();
    }
    e
}

fn t(p: u64, r: u32) -> HeckeElement {
    HeckeElement::t_p_power(p, r)
}

fn delta(p: u64, c: u32) -> HeckeElement {
    HeckeElement::scalar_power(p, c)
}

/// `T(p⁴)` from the relation in `T(p)`, `T(p²)` and `Δ`.
pub fn t_p4_from_relation(alg: &mut HeckeAlgebra) -> Result<HeckeElement> {
    let p = alg.p();
    let pi = p as i64;
    let t1 = t(p, 1);
    let t2 = t(p, 2);
    let t1sq = alg.hecke_multiply(&t1, &t1)?;
    let t1_4 = alg.hecke_multiply(&t1sq, &t1sq)?;
    let t2t1sq = alg.hecke_multiply(&t2, &t1sq)?;
    let t2sq = alg.hecke_multiply(&t2, &t2)?;
    let mut rhs = t1sq.shift(1).scale(&int(pi * pi + 2 * pi.pow(3)));
    rhs = rhs.sub(&t1_4)?;
    rhs = rhs.add(&t2.shift(1).scale(&int(pi * pi)))?;
    rhs = rhs.add(&t2t1sq)?;
    rhs = rhs.add(&t2sq)?;
    rhs = rhs.sub(&delta(p, 2).scale(&int(pi.pow(6))))?;
    Ok(rhs)
}

/// Left side minus right side of the degree-`n` recursion from the generating series:
/// `T(pⁿ) − T(p)T(pⁿ⁻¹) + (T(p)² − T(p²) − p²Δ)T(pⁿ⁻²) − p³ΔT(p)T(pⁿ⁻³) + p⁶Δ²T(pⁿ⁻⁴)`
/// minus `[n = 0] − p²Δ[n = 2]`.
pub fn recursion_defect(alg: &mut HeckeAlgebra, n: u32) -> Result<HeckeElement> {
    let p = alg.p();
    let pi = p as i64;
    let t1 = t(p, 1);
    let mut acc = t(p, n);
    if n >= 1 {
        acc = acc.sub(&alg.hecke_multiply(&t1, &t(p, n - 1))?)?;
    }
    if n >= 2 {
        let t1sq = alg.hecke_multiply(&t1, &t1)?;
        let c2 = t1sq.sub(&t(p, 2))?.sub(&delta(p, 1).scale(&int(pi * pi)))?;
        acc = acc.add(&alg.hecke_multiply(&c2, &t(p, n - 2))?)?;
    }
    if n >= 3 {
        let c3 = t1.shift(1).scale(&int(pi.pow(3)));
        acc = acc.sub(&alg.hecke_multiply(&c3, &t(p, n - 3))?)?;
    }
    if n >= 4 {
        acc = acc.add(&t(p, n - 4).shift(2).scale(&int(pi.pow(6))))?;
    }
    let mut rhs = HeckeElement::zero(p);
    if n == 0 {
        rhs = HeckeElement::identity(p);
    }
    if n == 2 {
        rhs = delta(p, 1).scale(&int(-pi * pi));
    }
    acc.sub(&rhs)
}

/// Coefficients `c_{r,b,s}` of `T(pʳ)²`.
pub fn square_coefficients(p: u64, r: u32, sq: &HeckeElement) -> Vec<SquareCoefficient> {
    let mut out = Vec::new();
    for (l, c) in sq.terms() {
        let s = r - l.a;
        let b = l.b - l.a;
        let bound = BigRational::from_integer(BigInt::from(p).pow(3 * r - 2 * s));
        let ratio = (c.abs() / bound).to_f64().unwrap_or(f64::INFINITY);
        out.push(SquareCoefficient { r, b, s, c: c.to_string(), ratio });
    }
    out
}

/// Exact verification of the Hecke relations at `p` up to degree `rmax`.
pub fn verify_identity_suite(alg: &mut HeckeAlgebra, rmax: u32) -> Result<IdentityReport> {
    let p = alg.p();
    let mut checks = Vec::new();

    for n in 0..=rmax.min(4) {
        let d = recursion_defect(alg, n)?;
        checks.push(CheckResult::equality(format!("generating-series recursion, degree {n}"), &d, &HeckeElement::zero(p)));
    }
    if rmax >= 2 {
        let t1 = t(p, 1);
        let sq = alg.hecke_multiply(&t1, &t1)?;
        checks.push(CheckResult::equality("T(p)^2 decomposition", &sq, &square_rhs(p)));
    }
    let mut square_coefficients_all = Vec::new();
    if rmax >= 4 {
        let t2 = t(p, 2);
        let t2sq = alg.hecke_multiply(&t2, &t2)?;
        checks.push(CheckResult::equality("T(p^2)^2 decomposition", &t2sq, &kodama_rhs(p, 2)));
        let rel = t_p4_from_relation(alg)?;
        checks.push(CheckResult::equality("T(p^4) relation", &t(p, 4), &rel));

        for r in 0..=rmax / 2 - 1 {
            kodamanew_checks(alg, r, &mut checks)?;
        }
        if alg.table_feasible(4) {
            square4_checks(alg, &mut checks, &mut square_coefficients_all)?;
        }
    }
    let square_constant = square_coefficients_all.iter().map(|c: &SquareCoefficient| c.ratio).fold(0.0, f64::max);
    Ok(IdentityReport { p, rmax, checks, square_coefficients: square_coefficients_all, square_constant })
}

/// `T(p^{2r+2}) ≤ T(p^{2r})T(p²) ≤ X₃ ≤ X₄` coefficientwise.
pub fn kodamanew_checks(alg: &mut HeckeAlgebra, r: u32, checks: &mut Vec<CheckResult>) -> Result<()> {
    let p = alg.p();
    let x1 = t(p, 2 * r + 2);
    let x2 = alg.t_power_product(2 * r, 2)?;
    let [x3, x4] = kodamanew_bounds(p, r);
    if r >= 1 {
        checks.push(CheckResult::equality(format!("T(p^{})T(p^2) decomposition", 2 * r), &x2, &kodama_rhs(p, 2 * r)));
    }
    checks.push(CheckResult::inequality(format!("chain r={r}: T(p^{}) <= T(p^{})T(p^2)", 2 * r + 2, 2 * r), &x1, &x2));
    checks.push(CheckResult::inequality(format!("chain r={r}: product <= 3p^2/6p^4/9p^6 bound"), &x2, &x3));
    checks.push(CheckResult::inequality(format!("chain r={r}: 3p^2/6p^4/9p^6 bound <= 10 p^(2r+4-2s) bound"), &x3, &x4));
    Ok(())
}

/// The chain bounding `T(p⁴)²` by the constant 400, and the coefficients `c_{r,b,s}` for `r ∈ {1, 2, 4}`.
pub fn square4_checks(alg: &mut HeckeAlgebra, checks: &mut Vec<CheckResult>, coeffs: &mut Vec<SquareCoefficient>) -> Result<()> {
    let p = alg.p();
    let t2 = t(p, 2);
    let y1 = alg.t_power_product(4, 4)?;
    let t4t2 = alg.t_power_product(4, 2)?;
    let y2 = alg.hecke_multiply(&t4t2, &t2)?;
    let mut inner3 = HeckeElement::zero(p);
    let mut inner4 = HeckeElement::zero(p);
    for s in 0..=3u32 {
        let w = int(10 * pw(p, 8 - 2 * s));
        inner3 = inner3.add(&a0_sum(p, s, 3 - s).scale(&w))?;
        inner4 = inner4.add(&t(p, 2 * s).shift(3 - s).scale(&w))?;
    }
    let y3 = alg.hecke_multiply(&inner3, &t2)?;
    let y4 = alg.hecke_multiply(&inner4, &t2)?;
    let y5 = square4_tail(p, false);
    let y6 = square4_tail(p, true);
    let names = ["T(p^4)^2 <= T(p^4)T(p^2)^2", "... <= first 10-bound", "... <= T(p^2s) form", "... <= 100-bound", "... <= 400-bound"];
    let ys = [&y1, &y2, &y3, &y4, &y5, &y6];
    for (i, name) in names.iter().enumerate() {
        checks.push(CheckResult::inequality(format!("T(p^4)^2 chain: {name}"), ys[i], ys[i + 1]));
    }
    for r in [1u32, 2] {
        let sq = alg.t_power_product(r, r)?;
        coeffs.extend(square_coefficients(p, r, &sq));
    }
    let c4 = square_coefficients(p, 4, &y1);
    let worst = c4.iter().map(|c| c.ratio).fold(0.0, f64::max);
    checks.push(CheckResult {
        name: "c_{4,b,s} <= 400 p^(12-2s)".into(),
        passed: worst <= 400.0,
        detail: format!("max |c|/p^(12-2s) = {worst:.6}"),
        mismatches: Vec::new(),
    });
    coeffs.extend(c4);
    Ok(())
}

/// `T(m₁)T(m₂) = T(m₁m₂)` for coprime `m₁, m₂`: every product of coset
/// representatives lands in a distinct coset of `S(m₁m₂)` and all cosets are hit.
pub fn coprime_smoke(m1: i64, m2: i64, budget: u128) -> Result<CheckResult> {
    let a = block_representatives(m1, budget)?;
    let b = block_representatives(m2, budget)?;
    let target = coset_count(m1 * m2);
    let mut seen = HashSet::with_capacity(a.len() * b.len());
    let mut repeats = 0u64;
    for x in &a {
        for y in &b {
            if !seen.insert(HnfKey::of(&sp4_core::intmat::try_mul(x, y)?)?) {
                repeats += 1;
            }
        }
    }
    let passed = repeats == 0 && seen.len() as u128 == target;
    Ok(CheckResult {
        name: format!("T({m1})T({m2}) = T({})", m1 * m2),
        passed,
        detail: format!("{} products, {} distinct cosets, {} cosets in S({})", a.len() * b.len(), seen.len(), target, m1 * m2),
        mismatches: Vec::new(),
    })
}

/// Largest `|c|` among the coefficients of an element.
pub fn max_abs_coefficient(e: &HeckeElement) -> BigRational {
    e.terms().values().map(|c| c.abs()).fold(BigRational::zero(), |a, b| if b > a { b } else { a })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiply::Budgets;

    #[test]
    fn trivial_suite() {
        let mut h = HeckeAlgebra::new(2, Budgets::default()).unwrap();
        let rep = verify_identity_suite(&mut h, 0).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.checks.len(), 1);
    }

    #[test]
    fn square_at_five() {
        let mut h = HeckeAlgebra::new(5, Budgets::default()).unwrap();
        let t1 = t(5, 1);
        let sq = h.hecke_multiply(&t1, &t1).unwrap();
        assert_eq!(sq.coefficient(&lab(5, 2, 1, 1)), int(156));
    }

    #[test]
    fn kodama_rhs_shape() {
        let e = kodama_rhs(2, 2);
        assert_eq!(e.terms().len(), 6);
        assert_eq!(e.coefficient(&lab(2, 4, 2, 2)), int(64 + 32 + 32 + 16 + 4 + 2 + 1));
    }

    #[test]
    fn coprime_degree_one() {
        let c = coprime_smoke(2, 3, 10_000).unwrap();
        assert!(c.passed, "{}", c.detail);
    }

    #[test]
    fn failures_name_the_label() {
        let a = HeckeElement::t_p_power(2, 2);
        let b = a.scale(&int(2));
        let c = CheckResult::equality("x", &b, &a);
        assert!(!c.passed);
        assert_eq!(c.mismatches.len(), 3);
        assert_eq!(c.mismatches[0].left, "2");
        assert!(CheckResult::inequality("y", &a, &b).passed);
    }
}
