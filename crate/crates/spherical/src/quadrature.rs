//! Haar quadrature on `K ≅ U(2)`.
//!
//! `U = e^{iψ} R(α, β, γ)` with `R(α, β, γ) ∈ SU(2)` in Euler angles. The map
//! `(ψ, α, β, γ) ∈ [0, 2π) × [0, 2π) × [0, π] × [0, 2π)` covers `U(2)` once, since
//! the sign ambiguity of the half-angle `γ ∈ [0, 2π)` is absorbed by `ψ`. Haar
//! measure is `dψ dα sin β dβ dγ`. The periodic angles use the trapezoidal rule
//! and `cos β` uses Gauss–Legendre nodes. Integrands invariant under `U ↦ −U`
//! (all spherical integrands, since `−1 ∈ M`) may use the even rule, which
//! restricts `ψ` to `[0, π)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use sp4_core::group::{CMat2, GroupElement, J_F64, mat_mul, mat_transpose};

use crate::error::{Result, SphericalError};

pub const MAX_LEVEL: u32 = 40;
/// Nodes per angular dimension at level 1.
pub const NODES_PER_LEVEL: usize = 4;
/// Largest rule [`HaarRule::materialize`] will build.
pub const MATERIALIZE_LIMIT: usize = 2_000_000;

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.reverse();
    out
}

fn trapezoid(n: usize, period: f64) -> Vec<(f64, f64)> {
    (0..n).map(|j| (period * (j as f64 + 0.5) / n as f64, 1.0 / n as f64)).collect()
}

/// Tensor-product rule at a given level; nodes are generated lazily.
#[derive(Debug, Clone)]
pub struct HaarRule {
    level: u32,
    /// `e^{iψ}` and weight.
    psi: Vec<(Complex64, f64)>,
    /// `e^{iα/2}`.
    alpha: Vec<(Complex64, f64)>,
    /// `(cos β/2, sin β/2)`.
    beta: Vec<(f64, f64, f64)>,
    /// `e^{iγ/2}`.
    gamma: Vec<(Complex64, f64)>,
}

impl HaarRule {
    pub fn new(level: u32) -> Result<Self> {
        Self::build(level, false)
    }

    /// Rule for integrands with `f(−U) = f(U)`, at half the cost.
    pub fn even(level: u32) -> Result<Self> {
        Self::build(level, true)
    }

    fn build(level: u32, even: bool) -> Result<Self> {
        if level == 0 || level > MAX_LEVEL {
            return Err(SphericalError::Level(level));
        }
        let l = NODES_PER_LEVEL * level as usize;
        let half = |v: Vec<(f64, f64)>| v.into_iter().map(|(a, w)| (Complex64::from_polar(1.0, a / 2.0), w)).collect();
        let psi = (if even { trapezoid(l, PI) } else { trapezoid(2 * l, 2.0 * PI) }).into_iter().map(|(a, w)| (Complex64::from_polar(1.0, a), w)).collect();
        let beta = gauss_legendre(l)
            .into_iter()
            .map(|(x, w)| (((1.0 + x) / 2.0).sqrt(), ((1.0 - x) / 2.0).sqrt(), w / 2.0))
            .collect();
        Ok(Self { level, psi, alpha: half(trapezoid(2 * l, 2.0 * PI)), beta, gamma: half(trapezoid(2 * l, 2.0 * PI)) })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.psi.len() * self.alpha.len() * self.beta.len() * self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Calls `f(U, w)` for every node, in a fixed order.
    #[inline]
    pub fn for_each(&self, mut f: impl FnMut(&CMat2, f64)) {
        for &(c, s, wb) in &self.beta {
            for &(ea, wa) in &self.alpha {
                for &(eg, wg) in &self.gamma {
                    let p = ea * eg;
                    let m = ea * eg.conj();
                    let r = [[p * c, -m * s], [m.conj() * s, p.conj() * c]];
                    let w0 = wb * wa * wg;
                    for &(z, wz) in &self.psi {
                        let u = [[z * r[0][0], z * r[0][1]], [z * r[1][0], z * r[1][1]]];
                        f(&u, w0 * wz);
                    }
                }
            }
        }
    }

    /// Explicit nodes and weights.
    pub fn materialize(&self) -> Result<QuadratureRule> {
        if self.len() > MATERIALIZE_LIMIT {
            return Err(SphericalError::Budget {
                what: format!("materializing level {}", self.level),
                needed: self.len() as u128,
                budget: MATERIALIZE_LIMIT as u128,
            });
        }
        let mut nodes = Vec::with_capacity(self.len());
        let mut weights = Vec::with_capacity(self.len());
        self.for_each(|u, w| {
            nodes.push(*u);
            weights.push(w);
        });
        Ok(QuadratureRule { level: self.level, nodes, weights })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadratureRule {
    pub level: u32,
    pub nodes: Vec<CMat2>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RuleCheck {
    pub weight_sum_error: f64,
    pub max_orthogonality_residual: f64,
    pub max_symplectic_residual: f64,
}

impl RuleCheck {
    pub fn passed(&self) -> bool {
        self.weight_sum_error <= 1e-12 && self.max_orthogonality_residual <= 1e-10 && self.max_symplectic_residual <= 1e-10
    }
}

impl QuadratureRule {
    /// `Σ w = 1`, `kᵀk = I` and `kᵀJk = J` for the real form of every node.
    pub fn check(&self) -> RuleCheck {
        let mut sum = 0.0;
        let (mut orth, mut symp) = (0.0f64, 0.0f64);
        for (u, w) in self.nodes.iter().zip(&self.weights) {
            sum += w;
            let k = GroupElement::from_unitary(u);
            let kt = mat_transpose(k.entries());
            let ktk = mat_mul(&kt, k.entries());
            let ktjk = mat_mul(&mat_mul(&kt, &J_F64), k.entries());
            for i in 0..4 {
                for j in 0..4 {
                    let id = if i == j { 1.0 } else { 0.0 };
                    orth = orth.max((ktk[i][j] - id).abs());
                    symp = symp.max((ktjk[i][j] - J_F64[i][j]).abs());
                }
            }
        }
        RuleCheck { weight_sum_error: (sum - 1.0).abs(), max_orthogonality_residual: orth, max_symplectic_residual: symp }
    }

    pub fn integrate(&self, f: impl Fn(&CMat2) -> Complex64) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(u, w)| f(u) * *w).sum()
    }
}

/// Quadrature of `f` with the lazy rule, using compensated summation.
pub fn integrate(rule: &HaarRule, mut f: impl FnMut(&CMat2) -> Complex64) -> Complex64 {
    let mut re = Neumaier::default();
    let mut im = Neumaier::default();
    rule.for_each(|u, w| {
        let v = f(u) * w;
        re.add(v.re);
        im.add(v.im);
    });
    Complex64::new(re.sum(), im.sum())
}

/// Neumaier's compensated sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct Neumaier {
    s: f64,
    c: f64,
}

impl Neumaier {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    pub fn sum(&self) -> f64 {
        self.s + self.c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tr(u: &CMat2) -> Complex64 {
        u[0][0] + u[1][1]
    }

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        let r = gauss_legendre(6);
        let s: f64 = r.iter().map(|(_, w)| w).sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m10: f64 = r.iter().map(|(x, w)| w * x.powi(10)).sum();
        assert!((m10 - 2.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn rule_invariants() {
        let rule = HaarRule::new(2).unwrap().materialize().unwrap();
        assert!(rule.check().passed(), "{:?}", rule.check());
    }

    #[test]
    fn character_integrals() {
        let rule = HaarRule::new(2).unwrap();
        let one = integrate(&rule, |_| Complex64::new(1.0, 0.0));
        assert!((one.re - 1.0).abs() < 1e-12 && one.im.abs() < 1e-12);
        // tr(U) is odd under U ↦ −U, so its square is the first nontrivial test.
        let t = integrate(&rule, tr);
        assert!(t.norm() < 1e-10);
        let t2 = integrate(&rule, |u| tr(u) * tr(u));
        assert!(t2.norm() < 1e-10);
        let abs2 = integrate(&rule, |u| Complex64::new(tr(u).norm_sqr(), 0.0));
        assert!((abs2.re - 1.0).abs() < 1e-8);
        let det = integrate(&rule, |u| u[0][0] * u[1][1] - u[0][1] * u[1][0]);
        assert!(det.norm() < 1e-10);
    }

    #[test]
    fn even_rule_agrees_on_even_integrands() {
        let f = |u: &CMat2| (u[0][0] * u[1][0] + u[0][1] * u[1][1].conj()).powi(2) + u[1][1].norm_sqr();
        let a = integrate(&HaarRule::new(3).unwrap(), f);
        let b = integrate(&HaarRule::even(3).unwrap(), f);
        assert!((a - b).norm() < 1e-13);
    }

    #[test]
    fn level_bounds() {
        assert!(HaarRule::new(0).is_err());
        assert!(HaarRule::new(MAX_LEVEL + 1).is_err());
        assert!(HaarRule::new(30).unwrap().materialize().is_err());
    }
}
