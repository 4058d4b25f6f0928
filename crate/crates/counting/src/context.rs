//! The quadratic data attached to a base point `g`.

use nalgebra::Matrix4;
use serde::Serialize;
use sp4_core::group::{mat_mul, mat_transpose, Mat4};
use sp4_core::intmat::IntMat4;
use sp4_core::{cartan_C, GroupElement};

use crate::error::{CountingError, Result};

/// Symplectic tolerance for `g⁻¹ m^{−1/2} γ g`.
const MEMBERSHIP_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct CountingContext {
    pub g: GroupElement,
    /// `Q = (g gᵀ)⁻¹`.
    pub q: Mat4,
    /// `Q⁻¹ = g gᵀ`.
    pub q_inv: Mat4,
    /// Columns `(q₁ 0 q₃ 0)`.
    pub q1: Mat4,
    /// Columns `(0 q₂ 0 q₄)`.
    pub q2: Mat4,
    /// `A₁₁, A₁₂, A₂₁, A₂₂`, used when `rᵀQ₁r` is large.
    pub a: [[Mat4; 2]; 2],
    /// `B₁₁, B₁₂, B₂₁, B₂₂`, used when `rᵀQ₂r` is large.
    pub b: [[Mat4; 2]; 2],
    /// Smallest eigenvalue of `Q`.
    pub lambda_min: f64,
}

/// Matrix with the given signed columns of `q`; `(sign, index)`.
fn from_columns(q: &Mat4, cols: [Option<(f64, usize)>; 4]) -> Mat4 {
    let mut m = [[0.0; 4]; 4];
    for (j, c) in cols.iter().enumerate() {
        if let Some((sign, k)) = c {
            for i in 0..4 {
                m[i][j] = sign * q[i][*k];
            }
        }
    }
    m
}

pub fn bilinear(m: &Mat4, u: &[f64; 4], v: &[f64; 4]) -> f64 {
    (0..4).map(|i| u[i] * (0..4).map(|j| m[i][j] * v[j]).sum::<f64>()).sum()
}

pub fn mat_vec(m: &Mat4, v: &[f64; 4]) -> [f64; 4] {
    std::array::from_fn(|i| (0..4).map(|j| m[i][j] * v[j]).sum())
}

pub fn to_f64(v: &[i64; 4]) -> [f64; 4] {
    v.map(|x| x as f64)
}

impl CountingContext {
    pub fn new(g: GroupElement) -> Result<Self> {
        let q_inv = mat_mul(g.entries(), &mat_transpose(g.entries()));
        let gi = g.inverse();
        let q = mat_mul(&mat_transpose(gi.entries()), gi.entries());
        let sym = Matrix4::from_fn(|i, j| 0.5 * (q[i][j] + q[j][i]));
        let lambda_min = sym.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if !(lambda_min > 0.0) {
            return Err(CountingError::Guard(format!("Q is not positive definite (λ_min = {lambda_min})")));
        }
        let c = |s: f64, k: usize| Some((s, k));
        let (q1c, q2c, q3c, q4c) = (0, 1, 2, 3);
        let a = [
            [from_columns(&q, [c(-1.0, q2c), None, None, c(-1.0, q3c)]), from_columns(&q, [c(-1.0, q4c), c(1.0, q3c), None, None])],
            [from_columns(&q, [None, None, c(-1.0, q2c), c(1.0, q1c)]), from_columns(&q, [None, c(-1.0, q1c), c(-1.0, q4c), None])],
        ];
        let b = [
            [from_columns(&q, [None, c(-1.0, q1c), c(-1.0, q4c), None]), from_columns(&q, [c(1.0, q4c), c(-1.0, q3c), None, None])],
            [from_columns(&q, [None, None, c(1.0, q2c), c(-1.0, q1c)]), from_columns(&q, [c(-1.0, q2c), None, None, c(-1.0, q3c)])],
        ];
        Ok(Self {
            g,
            q1: from_columns(&q, [c(1.0, q1c), None, c(1.0, q3c), None]),
            q2: from_columns(&q, [None, c(1.0, q2c), None, c(1.0, q4c)]),
            q,
            q_inv,
            a,
            b,
            lambda_min,
        })
    }

    pub fn identity() -> Self {
        Self::new(GroupElement::identity()).expect("identity is a valid base point")
    }

    /// Euclidean bound `τ = δ/√12` on each coordinate of the Cartan projection.
    pub fn tau(delta: f64) -> f64 {
        delta / 12f64.sqrt()
    }

    /// `|γ_ij| ≤ (m q_jj)^{1/2} e^τ ((Q⁻¹)_ii)^{1/2}`.
    pub fn entry_bound(&self, i: usize, j: usize, m: i64, delta: f64) -> i64 {
        let b = (m as f64 * self.q[j][j]).sqrt() * Self::tau(delta).exp() * self.q_inv[i][i].sqrt();
        (b * (1.0 + 1e-12) + 1e-9).floor() as i64
    }

    /// Admissible deviation `m(e^{2τ} − 1)(q_ii q_jj)^{1/2}` of `(γᵀQγ)_ij` from `m q_ij`.
    pub fn gram_tolerance(&self, i: usize, j: usize, m: i64, delta: f64) -> f64 {
        m as f64 * ((2.0 * Self::tau(delta)).exp() - 1.0) * (self.q[i][i] * self.q[j][j]).sqrt()
    }

    /// `‖C(g⁻¹ m^{−1/2} γ g)‖` in the Killing norm.
    pub fn cartan_norm(&self, gamma: &IntMat4, m: i64) -> Result<f64> {
        let s = (m as f64).sqrt();
        let gt: Mat4 = std::array::from_fn(|i| std::array::from_fn(|j| gamma[i][j] as f64 / s));
        let x = mat_mul(&mat_mul(self.g.inverse().entries(), &gt), self.g.entries());
        let e = GroupElement::new(x, MEMBERSHIP_TOLERANCE)?;
        Ok(cartan_C(&e)?.killing_norm())
    }

    pub fn is_member(&self, gamma: &IntMat4, m: i64, delta: f64) -> Result<bool> {
        Ok(self.cartan_norm(gamma, m)? <= delta)
    }

    /// `(s₁, s₃)` from `(s₂, s₄)` when `rᵀQ₁r ≠ 0`, or `(s₂, s₄)` from
    /// `(s₁, s₃)` when `branch` is 2, by the closed formulas with `A` or `B`.
    pub fn predicted_pair(&self, branch: u8, r: &[f64; 4], free: (f64, f64), m: i64) -> (f64, f64) {
        let (mats, qi, idx) = if branch == 1 { (&self.a, &self.q1, (0, 2)) } else { (&self.b, &self.q2, (1, 3)) };
        let den = bilinear(qi, r, r);
        let mq = m as f64 * self.q[0][1];
        let first = (free.0 * bilinear(&mats[0][0], r, r) + free.1 * bilinear(&mats[0][1], r, r) + mq * r[idx.0]) / den;
        let second = (free.0 * bilinear(&mats[1][0], r, r) + free.1 * bilinear(&mats[1][1], r, r) + mq * r[idx.1]) / den;
        (first, second)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use sp4_core::group::random_k;
    use sp4_core::CartanVector;

    fn sample_g() -> GroupElement {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let k = random_k(&mut rng);
        GroupElement::unipotent(0.3, [[0.2, -0.1], [-0.1, 0.4]]).mul(&CartanVector::new(0.2, -0.15).exp()).mul(&k)
    }

    #[test]
    fn split_sums_to_q() {
        let ctx = CountingContext::new(sample_g()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((ctx.q1[i][j] + ctx.q2[i][j] - ctx.q[i][j]).abs() < 1e-12);
                assert!((ctx.q[i][j] - ctx.q[j][i]).abs() < 1e-12);
            }
        }
        assert!(ctx.lambda_min > 0.0);
        let prod = mat_mul(&ctx.q, &ctx.q_inv);
        for i in 0..4 {
            for j in 0..4 {
                assert!((prod[i][j] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    /// The closed formulas agree with solving `rᵀJs = 0`, `rᵀQs = m q₁₂` directly.
    #[test]
    fn closed_formulas_solve_linear_system() {
        let ctx = CountingContext::new(sample_g()).unwrap();
        let (r, m) = ([1.3, -0.4, 2.1, 0.7], 11);
        let jr = [-r[2], -r[3], r[0], r[1]];
        let qr = mat_vec(&ctx.q, &r);
        let rhs = m as f64 * ctx.q[0][1];
        for (branch, solved, free) in [(1u8, (0, 2), (1, 3)), (2, (1, 3), (0, 2))] {
            let (x, y) = (0.8, -1.7);
            let (u, v) = ctx.predicted_pair(branch, &r, (x, y), m);
            let mut s = [0.0; 4];
            s[solved.0] = u;
            s[solved.1] = v;
            s[free.0] = x;
            s[free.1] = y;
            let js: f64 = (0..4).map(|i| jr[i] * s[i]).sum();
            let qs: f64 = (0..4).map(|i| qr[i] * s[i]).sum();
            assert!(js.abs() < 1e-10, "branch {branch}: rᵀJs = {js}");
            assert!((qs - rhs).abs() < 1e-10, "branch {branch}: rᵀQs = {qs}");
        }
    }

    #[test]
    fn identity_context_is_trivial() {
        let ctx = CountingContext::identity();
        assert_eq!(ctx.entry_bound(0, 0, 5, 0.1), 2);
        assert!((ctx.lambda_min - 1.0).abs() < 1e-12);
        let gamma = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];
        assert!(ctx.cartan_norm(&gamma, 1).unwrap() < 1e-12);
        let not_member = [[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, -1, 1]];
        assert!(!ctx.is_member(&not_member, 1, 0.3).unwrap());
    }
}
