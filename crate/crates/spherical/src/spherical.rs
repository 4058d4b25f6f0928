//! Spherical functions `φ_λ(exp H) = ∫_K e^{(iλ−ρ)(H(exp(H)k))} dk`.
//!
//! `H(g)` is the `KAN` Iwasawa projection. For `g = exp(H)k` it is read off
//! `P = (Im g⁻¹.iI)⁻¹ = M D⁻¹ M*` with `D = diag(e^{−2t₁}, e^{−2t₂})` and
//! `M = Re Uᵀ + i Im Uᵀ D`: `H₁ = ½ log P₁₁`, `H₂ = ½ log(det P / P₁₁)`.

use num_complex::Complex64;
use serde::Serialize;
use sp4_core::group::CMat2;
use sp4_core::CartanVector;

use crate::error::Result;
use crate::quadrature::{integrate, HaarRule, MAX_LEVEL};
use crate::spectral::SpectralParameter;

/// Consecutive levels differing by more than this are flagged.
pub const CONVERGENCE_TOL: f64 = 1e-6;

/// `(H₁, H₂)` of `exp(t)·k(U)` given `d = (e^{−2t₁}, e^{−2t₂})`.
#[inline]
pub fn iwasawa_kernel(u: &CMat2, d: [f64; 2]) -> [f64; 2] {
    // M_ij = Re U_ji + i d_j Im U_ji
    let m = |i: usize, j: usize| Complex64::new(u[j][i].re, d[j] * u[j][i].im);
    let (m00, m01, m10, m11) = (m(0, 0), m(0, 1), m(1, 0), m(1, 1));
    let p11 = m00.norm_sqr() / d[0] + m01.norm_sqr() / d[1];
    let det_p = (m00 * m11 - m01 * m10).norm_sqr() / (d[0] * d[1]);
    [0.5 * p11.ln(), 0.5 * (det_p / p11).ln()]
}

pub fn d_of(h: &CartanVector) -> [f64; 2] {
    [(-2.0 * h.t1).exp(), (-2.0 * h.t2).exp()]
}

/// `φ_λ(exp H)` with a fixed rule.
pub fn phi_with_rule(lambda: &SpectralParameter, h: &CartanVector, rule: &HaarRule) -> Complex64 {
    let d = d_of(h);
    // (iλ − ρ)(x) with ρ = (2, 1)
    let c1 = Complex64::new(-lambda.lambda1.im - 2.0, lambda.lambda1.re);
    let c2 = Complex64::new(-lambda.lambda2.im - 1.0, lambda.lambda2.re);
    integrate(rule, |u| {
        let x = iwasawa_kernel(u, d);
        (c1 * x[0] + c2 * x[1]).exp()
    })
}

/// Level at which the integrand is resolved: the phase varies by at most
/// `|λ|·|t|` over `K` and the amplitude by `|Im λ + ρ|·|t|`.
pub fn auto_level(lambda: &SpectralParameter, h: &CartanVector) -> u32 {
    let t = h.t1.hypot(h.t2);
    let re = lambda.lambda1.re.hypot(lambda.lambda2.re);
    let im = (lambda.lambda1.im + 2.0).hypot(lambda.lambda2.im + 1.0);
    let phase = (re + im) * t;
    ((phase / 5.0 + 4.0).ceil() as u32).clamp(2, MAX_LEVEL - 1)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhiValue {
    pub value: Complex64,
    /// Value at the previous level.
    pub coarse: Complex64,
    /// `|φ(level + 1) − φ(level)|`.
    pub error: f64,
    pub level: u32,
    pub flagged: bool,
}

/// `φ_λ(exp H)` at `level + 1`, with the difference to `level` as error estimate.
pub fn phi_at_level(lambda: &SpectralParameter, h: &CartanVector, level: u32) -> Result<PhiValue> {
    let coarse = phi_with_rule(lambda, h, &HaarRule::even(level)?);
    let fine = phi_with_rule(lambda, h, &HaarRule::even(level + 1)?);
    let error = (fine - coarse).norm();
    Ok(PhiValue { value: fine, coarse, error, level: level + 1, flagged: error > CONVERGENCE_TOL })
}

/// `φ_λ(exp H)` starting at the automatic level and escalating while two
/// successive levels differ by more than [`CONVERGENCE_TOL`], up to
/// [`ESCALATION_CAP`]; the result is flagged if the cap is reached.
pub fn phi(lambda: &SpectralParameter, h: &CartanVector) -> Result<PhiValue> {
    phi_from(lambda, h, auto_level(lambda, h))
}

/// Highest level [`phi`] escalates to.
pub const ESCALATION_CAP: u32 = 32;

pub fn phi_from(lambda: &SpectralParameter, h: &CartanVector, start: u32) -> Result<PhiValue> {
    let mut v = phi_at_level(lambda, h, start.min(ESCALATION_CAP - 1))?;
    while v.flagged && v.level < ESCALATION_CAP {
        let next = ((v.level as f64 * 1.25).ceil() as u32).min(ESCALATION_CAP);
        let value = phi_with_rule(lambda, h, &HaarRule::even(next)?);
        let error = (value - v.value).norm();
        v = PhiValue { value, coarse: v.value, error, level: next, flagged: error > CONVERGENCE_TOL };
    }
    Ok(v)
}
