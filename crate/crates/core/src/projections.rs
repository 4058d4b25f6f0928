//! Iwasawa and Cartan projections onto `𝔞`.

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::group::{mat_mul, mat_transpose, GroupElement};
use crate::siegel::{moebius, SiegelPoint};

/// `H = diag(t₁, t₂, −t₁, −t₂) ∈ 𝔞`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CartanVector {
    pub t1: f64,
    pub t2: f64,
}

impl CartanVector {
    pub fn new(t1: f64, t2: f64) -> Self {
        Self { t1, t2 }
    }

    /// Killing norm `√(12(t₁² + t₂²))`.
    pub fn killing_norm(&self) -> f64 {
        (12.0 * (self.t1 * self.t1 + self.t2 * self.t2)).sqrt()
    }

    pub fn euclidean_norm(&self) -> f64 {
        self.t1.hypot(self.t2)
    }

    /// The vector of Killing norm `norm` in direction `(c₁, c₂)`.
    pub fn with_killing_norm(direction: (f64, f64), norm: f64) -> Self {
        let e = direction.0.hypot(direction.1);
        let s = norm / (12f64.sqrt() * e);
        Self { t1: direction.0 * s, t2: direction.1 * s }
    }

    pub fn exp(&self) -> GroupElement {
        GroupElement::exp_a(self.t1, self.t2)
    }

    /// Killing form `⟨H, H'⟩ = 12(t₁t₁' + t₂t₂')`.
    pub fn killing_dot(&self, other: &Self) -> f64 {
        12.0 * (self.t1 * other.t1 + self.t2 * other.t2)
    }

    pub fn dominant(&self) -> Self {
        let (a, b) = (self.t1.abs(), self.t2.abs());
        Self { t1: a.max(b), t2: a.min(b) }
    }
}

/// `H(g)` for `g ∈ K exp(H(g)) N`, from the Siegel point `g⁻¹.(iI₂)`.
#[allow(non_snake_case)]
pub fn iwasawa_H(g: &GroupElement) -> Result<CartanVector> {
    let z = moebius(&g.inverse(), &SiegelPoint::base())?;
    let y = z.y;
    let d2 = y[1][1];
    if !(d2 > 0.0) {
        return Err(CoreError::NotPositiveDefinite);
    }
    let d1 = y[0][0] - y[0][1] * y[0][1] / d2;
    if !(d1 > 0.0) {
        return Err(CoreError::NotPositiveDefinite);
    }
    Ok(CartanVector { t1: -0.5 * d1.ln(), t2: -0.5 * d2.ln() })
}

/// Dominant `C(g)` with `g = k₁ exp(C(g)) k₂`, read from the eigenvalues of `gᵀg`.
#[allow(non_snake_case)]
pub fn cartan_C(g: &GroupElement) -> Result<CartanVector> {
    let m = g.entries();
    let gtg = mat_mul(&mat_transpose(m), m);
    let mat = Matrix4::from_fn(|i, j| 0.5 * (gtg[i][j] + gtg[j][i]));
    let mut ev: Vec<f64> = mat.symmetric_eigenvalues().iter().copied().collect();
    if ev.iter().any(|&x| !(x > 0.0)) {
        return Err(CoreError::NotPositiveDefinite);
    }
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    // For symplectic g the spectrum is {e^{±2t₁}, e^{±2t₂}}; averaging each
    // eigenvalue with its reciprocal partner improves accuracy near the identity.
    let t1 = 0.25 * (ev[0] / ev[3]).ln();
    let t2 = 0.25 * (ev[1] / ev[2]).ln();
    Ok(CartanVector { t1: t1.max(0.0), t2: t2.max(0.0) })
}
