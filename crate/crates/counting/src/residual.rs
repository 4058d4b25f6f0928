//! Structural residuals of an enumerated matrix.

use std::path::Path;

use serde::Serialize;
use sp4_core::intmat::IntMat4;

use crate::context::{bilinear, to_f64, CountingContext};
use crate::enumerate::{column, j_form};
use crate::error::Result;

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub gamma: IntMat4,
    pub m: i64,
    pub delta: f64,
    /// `|rᵀQr − m q₁₁|/m`.
    pub rr: f64,
    /// `|sᵀQs − m q₂₂|/m`.
    pub ss: f64,
    /// `|rᵀJs|/m`.
    pub rjs: f64,
    /// `|rᵀQs − m q₁₂|/m`.
    pub rqs: f64,
    /// 1 if `(s₁, s₃)` was reconstructed from `A`, 2 if `(s₂, s₄)` from `B`.
    pub branch: u8,
    /// Reconstruction errors of the solved pair divided by `m^{1/2}`.
    pub reconstruction: [f64; 2],
    /// Largest of the residuals above divided by `δ`.
    pub constant: f64,
    /// Admissible bound for `constant` from the singular-value window.
    pub bound: f64,
    /// `max |γ_ij| / m^{1/2}`.
    pub entry_ratio: f64,
    pub cartan_norm: f64,
}

impl ResidualReport {
    pub fn passed(&self) -> bool {
        self.rjs == 0.0 && self.constant <= self.bound && self.cartan_norm <= self.delta
    }

    /// JSON dump with the full matrix and residuals.
    pub fn dump(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

pub fn residual_check(gamma: &IntMat4, ctx: &CountingContext, delta: f64, m: i64) -> Result<ResidualReport> {
    let q = &ctx.q;
    let mf = m as f64;
    let (r, s) = (column(gamma, 0), column(gamma, 1));
    let (rf, sf) = (to_f64(&r), to_f64(&s));
    let rr = (bilinear(q, &rf, &rf) - mf * q[0][0]).abs() / mf;
    let ss = (bilinear(q, &sf, &sf) - mf * q[1][1]).abs() / mf;
    let rqs = (bilinear(q, &rf, &sf) - mf * q[0][1]).abs() / mf;
    let rjs = j_form(&r, &s).abs() as f64 / mf;
    let branch = if bilinear(&ctx.q1, &rf, &rf) >= bilinear(&ctx.q2, &rf, &rf) { 1 } else { 2 };
    let (solved, free) = if branch == 1 { ((0, 2), (1, 3)) } else { ((1, 3), (0, 2)) };
    let (p0, p1) = ctx.predicted_pair(branch, &rf, (sf[free.0], sf[free.1]), m);
    let root = mf.sqrt();
    let reconstruction = [(sf[solved.0] - p0).abs() / root, (sf[solved.1] - p1).abs() / root];
    let gram = ((2.0 * CountingContext::tau(delta)).exp() - 1.0) / delta;
    let diag = (0..4).map(|i| q[i][i]).fold(0.0, f64::max);
    let bound = gram * diag * (1.0 + 1e-9);
    let constant = [rr, ss, rqs].iter().fold(0.0f64, |a, b| a.max(*b)) / delta;
    Ok(ResidualReport {
        gamma: *gamma,
        m,
        delta,
        rr,
        ss,
        rjs,
        rqs,
        branch,
        reconstruction,
        constant,
        bound,
        entry_ratio: gamma.iter().flatten().map(|x| x.abs()).max().unwrap_or(0) as f64 / root,
        cartan_norm: ctx.cartan_norm(gamma, m)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{enumerate_s, EnumerationConfig};

    #[test]
    fn integral_k_has_zero_residuals() {
        let ctx = CountingContext::identity();
        let gamma = [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]];
        let r = residual_check(&gamma, &ctx, 0.05, 1).unwrap();
        assert_eq!((r.rr, r.ss, r.rjs, r.rqs), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(r.reconstruction, [0.0, 0.0]);
        assert!(r.passed());
    }

    #[test]
    fn enumerated_matrices_at_13() {
        let ctx = CountingContext::identity();
        let e = enumerate_s(&ctx, 0.1, 13, &EnumerationConfig::default()).unwrap();
        assert!(!e.matrices.is_empty());
        for g in &e.matrices {
            let r = residual_check(g, &ctx, 0.1, 13).unwrap();
            assert!(r.passed(), "{r:?}");
            assert!(r.entry_ratio <= CountingContext::tau(0.1).exp());
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gamma.json");
        residual_check(&e.matrices[0], &ctx, 0.1, 13).unwrap().dump(&path).unwrap();
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(v["m"], 13);
    }
}
