//! Enumeration of `S(g)_δ[m] = {γ ∈ S(m) : ‖C(g⁻¹ m^{−1/2} γ g)‖ ≤ δ}`.
//!
//! With `M = g⁻¹ m^{−1/2} γ g` the singular values of `M` lie in
//! `[e^{−τ}, e^{τ}]`, `τ = δ/√12`, so `‖γᵀQγ − mQ‖` is controlled entrywise by
//! `m(e^{2τ} − 1)(q_ii q_jj)^{1/2}`. Every floating-point window below is derived
//! from this and only prunes; acceptance is exact.

use std::collections::BTreeSet;

use nalgebra::{Matrix4, Vector4};
use serde::Serialize;
use sp4_core::intmat::IntMat4;
use sp4_core::similitude_of;

use crate::context::{bilinear, mat_vec, to_f64, CountingContext};
use crate::error::{CountingError, Result};
use crate::quadratic::QuadPoly2;

pub const DELTA_CEILING: f64 = 0.3;
pub const DEFAULT_THETA: f64 = 0.25;
pub const DEFAULT_BUDGET: u128 = 500_000_000;
/// Relative widening of every floating-point window.
const WINDOW_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnumerationConfig {
    /// A branch is usable when `rᵀQᵢr ≥ θ m q₁₁`.
    pub theta: f64,
    /// Lattice points visited before giving up.
    pub budget: u128,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        Self { theta: DEFAULT_THETA, budget: DEFAULT_BUDGET }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct EnumerationStats {
    pub r_candidates: u64,
    pub s_candidates: u64,
    pub completions: u64,
    pub visited: u128,
    /// Number of `r` handled by solving for `(s₁, s₃)` and for `(s₂, s₄)`.
    pub branch_counts: [u64; 2],
    /// Smallest `−Δ / (4 λ_min(Q)²)` over the `s`-phase quadratics.
    pub min_discriminant_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Enumeration {
    pub m: i64,
    pub delta: f64,
    /// Sorted, without duplicates.
    pub matrices: Vec<IntMat4>,
    pub stats: EnumerationStats,
}

struct Budget {
    used: u128,
    limit: u128,
}

impl Budget {
    fn charge(&mut self, what: &str, n: u128) -> Result<()> {
        self.used += n;
        if self.used > self.limit {
            return Err(CountingError::Budget { what: what.into(), needed: self.used, budget: self.limit });
        }
        Ok(())
    }

    fn remaining(&self) -> u128 {
        self.limit.saturating_sub(self.used)
    }
}

fn check_args(delta: f64, m: i64) -> Result<()> {
    if m < 1 {
        return Err(CountingError::Invalid(format!("m must be positive, got {m}")));
    }
    if !(delta > 0.0) {
        return Err(CountingError::Invalid(format!("delta must be positive, got {delta}")));
    }
    if delta > DELTA_CEILING {
        return Err(CountingError::DeltaCeiling(delta));
    }
    Ok(())
}

/// `uᵀJv` for integer vectors.
pub fn j_form(u: &[i64; 4], v: &[i64; 4]) -> i64 {
    u[0] * v[2] + u[1] * v[3] - u[2] * v[0] - u[3] * v[1]
}

fn from_columns(cols: [&[i64; 4]; 4]) -> IntMat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i]))
}

pub fn column(gamma: &IntMat4, j: usize) -> [i64; 4] {
    std::array::from_fn(|i| gamma[i][j])
}

fn int_range(center: f64, half: f64) -> std::ops::RangeInclusive<i64> {
    let slack = WINDOW_SLACK * (1.0 + center.abs() + half);
    ((center - half - slack).ceil() as i64)..=((center + half + slack).floor() as i64)
}

fn range_len(r: &std::ops::RangeInclusive<i64>) -> u128 {
    (r.end() - r.start() + 1).max(0) as u128
}

/// Integer vectors in the box `t⁰ ± h` satisfying `pred`.
fn box_points(center: &[f64; 4], half: &[f64; 4], budget: &mut Budget, mut pred: impl FnMut(&[i64; 4]) -> bool) -> Result<Vec<[i64; 4]>> {
    let ranges: Vec<_> = (0..4).map(|i| int_range(center[i], half[i])).collect();
    budget.charge("completion box", ranges.iter().map(range_len).product())?;
    let mut out = Vec::new();
    for a in ranges[0].clone() {
        for b in ranges[1].clone() {
            for c in ranges[2].clone() {
                for d in ranges[3].clone() {
                    let v = [a, b, c, d];
                    if pred(&v) {
                        out.push(v);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Columns `t` (`col = 2`) or `u` (`col = 3`) compatible with `r, s`:
/// `N x = rhs + (0, 0, e₁, e₂)` with rows `Jᵀr, Jᵀs, Qr, Qs`.
fn completion_box(ctx: &CountingContext, r: &[i64; 4], s: &[i64; 4], col: usize, m: i64, delta: f64) -> Result<([f64; 4], [f64; 4])> {
    let (rf, sf) = (to_f64(r), to_f64(s));
    let (qr, qs) = (mat_vec(&ctx.q, &rf), mat_vec(&ctx.q, &sf));
    let jr = [-rf[2], -rf[3], rf[0], rf[1]];
    let js = [-sf[2], -sf[3], sf[0], sf[1]];
    let rows = [jr, js, qr, qs];
    let n = Matrix4::from_fn(|i, j| rows[i][j]);
    let scale: f64 = rows.iter().map(|row| row.iter().map(|x| x * x).sum::<f64>().sqrt()).product();
    let det = n.determinant();
    if !(det.abs() > 1e-10 * scale) {
        return Err(CountingError::Guard(format!("singular completion system for r = {r:?}, s = {s:?}")));
    }
    let inv = n.try_inverse().ok_or_else(|| CountingError::Guard("completion system not invertible".into()))?;
    let mf = m as f64;
    let (jr_rhs, js_rhs) = if col == 2 { (mf, 0.0) } else { (0.0, mf) };
    let rhs = Vector4::new(jr_rhs, js_rhs, mf * ctx.q[0][col], mf * ctx.q[1][col]);
    let center = inv * rhs;
    let (e1, e2) = (ctx.gram_tolerance(0, col, m, delta), ctx.gram_tolerance(1, col, m, delta));
    let half = std::array::from_fn(|i| inv[(i, 2)].abs() * e1 + inv[(i, 3)].abs() * e2);
    Ok((std::array::from_fn(|i| center[i]), half))
}

/// Exact similitude test followed by the Cartan criterion.
fn accept(ctx: &CountingContext, gamma: &IntMat4, m: i64, delta: f64) -> Result<bool> {
    if similitude_of(gamma) != Some(m) {
        return Ok(false);
    }
    ctx.is_member(gamma, m, delta)
}

/// Completes `(r, s)` by the third and fourth columns and collects members.
fn complete(ctx: &CountingContext, r: &[i64; 4], s: &[i64; 4], m: i64, delta: f64, budget: &mut Budget, out: &mut BTreeSet<IntMat4>) -> Result<u64> {
    let (tc, th) = completion_box(ctx, r, s, 2, m, delta)?;
    let ts = box_points(&tc, &th, budget, |t| j_form(r, t) == m && j_form(s, t) == 0)?;
    if ts.is_empty() {
        return Ok(0);
    }
    let (uc, uh) = completion_box(ctx, r, s, 3, m, delta)?;
    let us = box_points(&uc, &uh, budget, |u| j_form(r, u) == 0 && j_form(s, u) == m)?;
    let mut n = 0;
    for t in &ts {
        for u in &us {
            if j_form(t, u) != 0 {
                continue;
            }
            n += 1;
            let gamma = from_columns([r, s, t, u]);
            if accept(ctx, &gamma, m, delta)? {
                out.insert(gamma);
            }
        }
    }
    Ok(n)
}

/// Gram windows `|vᵀQv − m q_jj| ≤ tol` with slack.
fn gram_ok(ctx: &CountingContext, u: &[f64; 4], v: &[f64; 4], i: usize, j: usize, m: i64, delta: f64) -> bool {
    let tol = ctx.gram_tolerance(i, j, m, delta);
    (bilinear(&ctx.q, u, v) - m as f64 * ctx.q[i][j]).abs() <= tol * (1.0 + WINDOW_SLACK) + WINDOW_SLACK * m as f64
}

/// `S(g)_δ[m]`: loop `(r₁, r₂)`, find `(r₃, r₄)` on the first quadric, solve two
/// entries of `s` linearly, find the other two on the second quadric and
/// complete the last two columns over their residual boxes.
pub fn enumerate_s(ctx: &CountingContext, delta: f64, m: i64, cfg: &EnumerationConfig) -> Result<Enumeration> {
    check_args(delta, m)?;
    if !(cfg.theta > 0.0 && cfg.theta < 1.0) {
        return Err(CountingError::Invalid(format!("theta must lie in (0, 1), got {}", cfg.theta)));
    }
    let q = &ctx.q;
    let mf = m as f64;
    let tau = CountingContext::tau(delta);
    let mut budget = Budget { used: 0, limit: cfg.budget };
    let mut stats = EnumerationStats { min_discriminant_ratio: f64::INFINITY, ..Default::default() };
    let mut found = BTreeSet::new();
    let (b1, b2) = (ctx.entry_bound(0, 0, m, delta), ctx.entry_bound(1, 0, m, delta));
    let r_lo = mf * q[0][0] * ((-2.0 * tau).exp() - 1.0);
    let r_hi = mf * q[0][0] * ((2.0 * tau).exp() - 1.0);
    let r_slack = WINDOW_SLACK * mf * q[0][0];
    let e12 = ctx.gram_tolerance(0, 1, m, delta);
    let norm_s = (mf * q[1][1]).sqrt();
    for r1 in -b1..=b1 {
        for r2 in -b2..=b2 {
            let (x1, x2) = (r1 as f64, r2 as f64);
            let p = QuadPoly2::new(
                q[2][2],
                2.0 * q[2][3],
                q[3][3],
                2.0 * (q[0][2] * x1 + q[1][2] * x2),
                2.0 * (q[0][3] * x1 + q[1][3] * x2),
                q[0][0] * x1 * x1 + 2.0 * q[0][1] * x1 * x2 + q[1][1] * x2 * x2 - mf * q[0][0],
            );
            let tail = p.points_in_window(r_lo - r_slack, r_hi + r_slack, budget.remaining())?;
            budget.charge("r-phase", tail.len() as u128 + 1)?;
            for (r3, r4) in tail {
                let r = [r1, r2, r3, r4];
                stats.r_candidates += 1;
                let rf = to_f64(&r);
                let (v1, v2) = (bilinear(&ctx.q1, &rf, &rf), bilinear(&ctx.q2, &rf, &rf));
                let branch = if v1 >= v2 { 0 } else { 1 };
                if v1.max(v2) < cfg.theta * mf * q[0][0] {
                    return Err(CountingError::Guard(format!("no branch applies to r = {r:?}")));
                }
                stats.branch_counts[branch] += 1;
                let (solved, free) = if branch == 0 { ((0, 2), (1, 3)) } else { ((1, 3), (0, 2)) };
                let a = [-rf[2], -rf[3], rf[0], rf[1]];
                let b = mat_vec(q, &rf);
                let det = a[solved.0] * b[solved.1] - a[solved.1] * b[solved.0];
                // (s_i, s_j) for right-hand sides (R₁, R₂)
                let solve = |r1: f64, r2: f64| ((b[solved.1] * r1 - a[solved.1] * r2) / det, (-b[solved.0] * r1 + a[solved.0] * r2) / det);
                let embed = |(x, y): (f64, f64), fx: f64, fy: f64| {
                    let mut v = [0.0; 4];
                    v[solved.0] = x;
                    v[solved.1] = y;
                    v[free.0] = fx;
                    v[free.1] = fy;
                    v
                };
                let c0 = embed(solve(0.0, mf * q[0][1]), 0.0, 0.0);
                let c1 = embed(solve(-a[free.0], -b[free.0]), 1.0, 0.0);
                let c2 = embed(solve(-a[free.1], -b[free.1]), 0.0, 1.0);
                let w = embed(solve(0.0, 1.0), 0.0, 0.0);
                let quad = QuadPoly2::new(
                    bilinear(q, &c1, &c1),
                    2.0 * bilinear(q, &c1, &c2),
                    bilinear(q, &c2, &c2),
                    2.0 * bilinear(q, &c0, &c1),
                    2.0 * bilinear(q, &c0, &c2),
                    bilinear(q, &c0, &c0),
                );
                let ratio = -quad.discriminant() / (4.0 * ctx.lambda_min * ctx.lambda_min);
                if !(ratio >= 1.0 - 1e-9) {
                    return Err(CountingError::Guard(format!("s-phase discriminant below the Minkowski bound for r = {r:?}")));
                }
                stats.min_discriminant_ratio = stats.min_discriminant_ratio.min(ratio);
                let beta = e12 * bilinear(q, &w, &w).sqrt();
                let lo = (norm_s * (-tau).exp() - beta).max(0.0).powi(2);
                let hi = (norm_s * tau.exp() + beta).powi(2);
                let slack = WINDOW_SLACK * hi;
                let frees = quad.points_in_window(lo - slack, hi + slack, budget.remaining())?;
                budget.charge("s-phase", frees.len() as u128 + 1)?;
                for (fx, fy) in frees {
                    let s0: [f64; 4] = std::array::from_fn(|i| c0[i] + fx as f64 * c1[i] + fy as f64 * c2[i]);
                    let range_x = int_range(s0[solved.0], e12 * w[solved.0].abs());
                    let range_y = int_range(s0[solved.1], e12 * w[solved.1].abs());
                    budget.charge("s-pairs", range_len(&range_x) * range_len(&range_y))?;
                    for sx in range_x {
                        for sy in range_y.clone() {
                            let mut s = [0i64; 4];
                            s[solved.0] = sx;
                            s[solved.1] = sy;
                            s[free.0] = fx;
                            s[free.1] = fy;
                            if j_form(&r, &s) != 0 {
                                continue;
                            }
                            let sf = to_f64(&s);
                            if !gram_ok(ctx, &sf, &sf, 1, 1, m, delta) || !gram_ok(ctx, &rf, &sf, 0, 1, m, delta) {
                                continue;
                            }
                            stats.s_candidates += 1;
                            stats.completions += complete(ctx, &r, &s, m, delta, &mut budget, &mut found)?;
                        }
                    }
                }
            }
        }
    }
    stats.visited = budget.used;
    Ok(Enumeration { m, delta, matrices: found.into_iter().collect(), stats })
}

/// Independent oracle: every column in its entry box and Gram window, all
/// quadruples with the exact `J`-relations, then the exact final test.
pub fn naive_enumerate(ctx: &CountingContext, delta: f64, m: i64, budget: u128) -> Result<Vec<IntMat4>> {
    check_args(delta, m)?;
    let mut budget = Budget { used: 0, limit: budget };
    let mut cols: Vec<Vec<[i64; 4]>> = Vec::with_capacity(4);
    for j in 0..4 {
        let center = [0.0; 4];
        let half: [f64; 4] = std::array::from_fn(|i| ctx.entry_bound(i, j, m, delta) as f64);
        let list = box_points(&center, &half, &mut budget, |v| {
            let vf = to_f64(v);
            gram_ok(ctx, &vf, &vf, j, j, m, delta)
        })?;
        cols.push(list);
    }
    let mut out = BTreeSet::new();
    for r in &cols[0] {
        for s in cols[1].iter().filter(|s| j_form(r, s) == 0) {
            let ts: Vec<_> = cols[2].iter().filter(|t| j_form(r, t) == m && j_form(s, t) == 0).collect();
            if ts.is_empty() {
                continue;
            }
            let us: Vec<_> = cols[3].iter().filter(|u| j_form(r, u) == 0 && j_form(s, u) == m).collect();
            budget.charge("oracle quadruples", (ts.len() * us.len()) as u128)?;
            for t in &ts {
                for u in us.iter().filter(|u| j_form(t, u) == 0) {
                    let gamma = from_columns([r, s, t, u]);
                    if accept(ctx, &gamma, m, delta)? {
                        out.insert(gamma);
                    }
                }
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// `(a₁ a₃ a₂ a₄; −a₃ a₁ a₄ −a₂; −a₂ −a₄ a₁ a₃; −a₄ a₂ −a₃ a₁)`.
pub fn quaternion_matrix(a: [i64; 4]) -> IntMat4 {
    let [a1, a2, a3, a4] = a;
    [[a1, a3, a2, a4], [-a3, a1, a4, -a2], [-a2, -a4, a1, a3], [-a4, a2, -a3, a1]]
}

/// All `(a₁, …, a₄)` with `Σ aᵢ² = m`.
pub fn four_square_representations(m: i64) -> Vec<[i64; 4]> {
    let b = (m as f64).sqrt().floor() as i64 + 1;
    let mut out = Vec::new();
    for a1 in -b..=b {
        for a2 in -b..=b {
            for a3 in -b..=b {
                let rest = m - a1 * a1 - a2 * a2 - a3 * a3;
                if rest < 0 {
                    continue;
                }
                let a4 = (rest as f64).sqrt().round() as i64;
                if a4 * a4 == rest {
                    out.push([a1, a2, a3, a4]);
                    if a4 != 0 {
                        out.push([a1, a2, a3, -a4]);
                    }
                }
            }
        }
    }
    out
}

pub fn quaternion_family(m: i64) -> Vec<IntMat4> {
    four_square_representations(m).into_iter().map(quaternion_matrix).collect()
}

/// Sum of divisors.
pub fn sigma(m: u64) -> u64 {
    (1..=m).filter(|d| m % d == 0).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use sp4_core::{CartanVector, GroupElement};

    #[test]
    fn identity_at_m1_gives_32() {
        let ctx = CountingContext::identity();
        let e = enumerate_s(&ctx, 0.05, 1, &EnumerationConfig::default()).unwrap();
        assert_eq!(e.matrices.len(), 32);
        assert_eq!(naive_enumerate(&ctx, 0.05, 1, DEFAULT_BUDGET).unwrap(), e.matrices);
    }

    #[test]
    fn quaternion_family_is_contained() {
        let ctx = CountingContext::identity();
        let fam = quaternion_family(5);
        assert_eq!(fam.len(), 48);
        let e = enumerate_s(&ctx, 0.1, 5, &EnumerationConfig::default()).unwrap();
        for q in &fam {
            assert_eq!(similitude_of(q), Some(5));
            assert!(e.matrices.binary_search(q).is_ok(), "{q:?}");
        }
    }

    #[test]
    fn matches_oracle_at_small_m() {
        let ctx = CountingContext::identity();
        for m in 1..=8 {
            for delta in [0.05, 0.2] {
                let e = enumerate_s(&ctx, delta, m, &EnumerationConfig::default()).unwrap();
                let o = naive_enumerate(&ctx, delta, m, DEFAULT_BUDGET).unwrap();
                assert_eq!(e.matrices, o, "m = {m}, delta = {delta}");
            }
        }
    }

    #[test]
    fn matches_oracle_off_identity() {
        let g = GroupElement::unipotent(0.4, [[0.3, -0.2], [-0.2, 0.5]]).mul(&CartanVector::new(0.3, -0.2).exp());
        let ctx = CountingContext::new(g).unwrap();
        for m in [1, 2, 4, 9, 17] {
            let e = enumerate_s(&ctx, 0.3, m, &EnumerationConfig::default()).unwrap();
            let o = naive_enumerate(&ctx, 0.3, m, DEFAULT_BUDGET).unwrap();
            assert_eq!(e.matrices, o, "m = {m}");
            assert!(e.stats.min_discriminant_ratio >= 1.0);
        }
    }

    #[test]
    fn monotone_in_delta() {
        let ctx = CountingContext::identity();
        let small = enumerate_s(&ctx, 0.05, 6, &EnumerationConfig::default()).unwrap();
        let large = enumerate_s(&ctx, 0.3, 6, &EnumerationConfig::default()).unwrap();
        assert!(small.matrices.iter().all(|g| large.matrices.binary_search(g).is_ok()));
    }

    #[test]
    fn rejects_large_delta_and_bad_m() {
        let ctx = CountingContext::identity();
        assert!(matches!(enumerate_s(&ctx, 0.31, 1, &EnumerationConfig::default()), Err(CountingError::DeltaCeiling(_))));
        assert!(enumerate_s(&ctx, 0.1, 0, &EnumerationConfig::default()).is_err());
        let tiny = EnumerationConfig { budget: 10, ..Default::default() };
        assert!(matches!(enumerate_s(&ctx, 0.1, 9, &tiny), Err(CountingError::Budget { .. })));
    }

    #[test]
    fn divisor_sums() {
        assert_eq!([1, 2, 3, 4, 6, 9].map(sigma), [1, 3, 4, 7, 12, 13]);
        for m in [1i64, 3, 5, 7, 9, 15] {
            assert_eq!(four_square_representations(m).len() as u64, 8 * sigma(m as u64));
        }
    }
}
