//! Exponent bookkeeping for the sup-norm bound.
//!
//! With `δ^{1/2+η} = ‖μ‖^{−1/2}` and `L = ⌈δ^{−η/B}⌉` both contributions
//! are `‖μ‖⁴`, and the amplified bound reads `|F|² ≪ ‖μ‖⁴ L^{−3/4}`.

use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Serialize)]
pub struct ExponentReport {
    pub eta: f64,
    pub b: f64,
    /// `δ = ‖μ‖^{delta_exponent}`.
    pub delta_exponent: f64,
    /// `L ≍ ‖μ‖^{l_exponent}`.
    pub l_exponent: f64,
    /// Exponent of `‖μ‖` in the part with `‖C‖ ≥ δ`.
    pub far_contribution: f64,
    /// Exponent of `‖μ‖` in the part with `‖C‖ ≤ δ`, before dividing by `L⁵`.
    pub near_contribution: f64,
    /// Exponent of `‖μ‖` in the bound for `|F|²`.
    pub squared_exponent: f64,
    /// Half of `squared_exponent`.
    pub root_exponent: f64,
    /// `2 − 3η/(4B(1+2η))`.
    pub exponent: f64,
}

pub fn displayed_exponent(eta: f64, b: f64) -> f64 {
    2.0 - 3.0 * eta / (4.0 * b * (1.0 + 2.0 * eta))
}

pub fn exponent_report(eta: f64, b: f64) -> Result<ExponentReport> {
    if !(eta > 0.0 && b > 0.0 && eta.is_finite() && b.is_finite()) {
        return Err(CliError::Usage(format!("eta and B must be positive and finite, got eta = {eta}, B = {b}")));
    }
    let delta_exponent = -1.0 / (1.0 + 2.0 * eta);
    let l_exponent = -delta_exponent * eta / b;
    // ‖μ‖^{7/2} δ^{−1/2} L^B with L^B = δ^{−η}
    let far_contribution = 3.5 + delta_exponent * (-0.5 - eta);
    // ‖μ‖⁴ L⁴ (1 + δ^η L^B)
    let near_contribution = 4.0 + 4.0 * l_exponent;
    let squared_exponent = 4.0 - 0.75 * l_exponent;
    Ok(ExponentReport {
        eta,
        b,
        delta_exponent,
        l_exponent,
        far_contribution,
        near_contribution,
        squared_exponent,
        root_exponent: squared_exponent / 2.0,
        exponent: displayed_exponent(eta, b),
    })
}

impl ExponentReport {
    pub fn lines(&self) -> Vec<String> {
        vec![
            format!("eta = {}, B = {}", self.eta, self.b),
            format!("delta^(1/2 + eta) = |mu|^(-1/2)  =>  delta = |mu|^({:.15})", self.delta_exponent),
            format!("L = ceil(delta^(-eta/B))  =>  L ~ |mu|^({:.15})", self.l_exponent),
            format!("||C|| >= delta part: |mu|^{:.15}", self.far_contribution),
            format!("||C|| <= delta part: |mu|^{:.15} before the L^5 normalization", self.near_contribution),
            format!("|F|^2 << |mu|^4 L^(-3/4) = |mu|^{:.15}", self.squared_exponent),
            format!("square root of the |F|^2 bound: |mu|^{:.15}", self.root_exponent),
            format!("exponent 2 - 3 eta/(4B(1 + 2 eta)) = {:.15}", self.exponent),
        ]
    }
}
