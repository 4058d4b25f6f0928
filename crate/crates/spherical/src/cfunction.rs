//! The Harish-Chandra `c`-function of `Sp₄(ℝ)`.
//!
//! All roots have multiplicity one, so after the duplication formula each
//! factor of the product formula is `Γ(iz)/(√(2π) Γ(iz + ½))` with
//! `z = ⟨λ, α⟩/⟨α, α⟩`. For the positive roots `e₁ ± e₂, 2e₁, 2e₂` this is
//! `z = (λ₁ ± λ₂)/2, λ₁/2, λ₂/2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::spectral::SpectralParameter;

/// Normalizing constant, fixed by `c(−iρ) = 1`.
pub const C0: f64 = 4.0 * PI;
/// Root coordinates closer to zero than this are treated as poles.
pub const POLE_MARGIN: f64 = 1e-12;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `log Γ(z)` on any branch (only its exponential is used).
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z)Γ(1 − z) = π / sin(πz)
        return Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut a = Complex64::new(LANCZOS[0], 0.0);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// `log sin(πz)` without overflow for large `|Im z|`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    // sin w = −e^{−iw}(1 − e^{2iw})/(2i), with |e^{2iw}| ≤ 1
    let w = z * PI;
    let i = Complex64::i();
    -i * w + (1.0 - (2.0 * i * w).exp()).ln() - (-2.0 * i).ln()
}

/// `z = ⟨λ, α⟩/⟨α, α⟩` for the positive roots.
pub fn root_coordinates(lambda: &SpectralParameter) -> [Complex64; 4] {
    let (a, b) = (lambda.lambda1, lambda.lambda2);
    [(a - b) / 2.0, (a + b) / 2.0, a / 2.0, b / 2.0]
}

/// `c(λ)` from the product formula, or `None` at a pole.
pub fn c_function(lambda: &SpectralParameter) -> Option<Complex64> {
    let i = Complex64::i();
    let mut log = Complex64::new(C0.ln(), 0.0);
    for z in root_coordinates(lambda) {
        let iz = i * z;
        if poleward(iz) {
            return None;
        }
        log += ln_gamma(iz) - ln_gamma(iz + 0.5) - 0.5 * (2.0 * PI).ln();
    }
    Some(log.exp())
}

/// Poles of `Γ(iz)` sit at `iz ∈ {0, −1, −2, …}`.
fn poleward(iz: Complex64) -> bool {
    iz.re < POLE_MARGIN && (iz.re - iz.re.round()).abs() < POLE_MARGIN && iz.im.abs() < POLE_MARGIN
}

/// `γ(x) = x tanh(πx/2)`.
pub fn gamma_factor(x: f64) -> f64 {
    x * (PI * x / 2.0).tanh()
}

/// `(π/4)² γ(λ₁) γ(λ₂) γ(λ₁ + λ₂) γ(λ₁ − λ₂)` for real `λ`.
pub fn c_inv_sq_closed(l1: f64, l2: f64) -> f64 {
    (PI / 4.0).powi(2) * gamma_factor(l1) * gamma_factor(l2) * gamma_factor(l1 + l2) * gamma_factor(l1 - l2)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CInvSq {
    pub lambda1: f64,
    pub lambda2: f64,
    /// `|c(λ)|⁻²` from the product formula; `None` at a pole.
    pub product: Option<f64>,
    pub closed: f64,
    /// `|product − closed| / closed`, when both are defined and nonzero.
    pub relative_difference: Option<f64>,
}

impl CInvSq {
    pub fn pole_flagged(&self) -> bool {
        self.product.is_none()
    }
}

/// `|c(λ)|⁻²` computed both ways, for real `λ`.
pub fn c_function_inv_sq(l1: f64, l2: f64) -> CInvSq {
    let product = c_function(&SpectralParameter::real(l1, l2)).map(|c| 1.0 / c.norm_sqr());
    let closed = c_inv_sq_closed(l1, l2);
    let relative_difference = product.filter(|_| closed != 0.0).map(|p| (p - closed).abs() / closed.abs());
    CInvSq { lambda1: l1, lambda2: l2, product, closed, relative_difference }
}

/// `max |c(λ)|⁻² / ‖λ‖⁴` over the given real parameters.
pub fn plancherel_growth_ratio(points: &[SpectralParameter]) -> f64 {
    points
        .iter()
        .map(|l| c_inv_sq_closed(l.lambda1.re, l.lambda2.re) / l.norm().powi(4))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_known_values() {
        let g = |x: f64, y: f64| ln_gamma(Complex64::new(x, y)).exp();
        assert!((g(5.0, 0.0).re - 24.0).abs() < 1e-12);
        assert!((g(0.5, 0.0).re - PI.sqrt()).abs() < 1e-14);
        assert!((g(-0.5, 0.0).re + 2.0 * PI.sqrt()).abs() < 1e-13);
        // |Γ(iy)|² = π / (y sinh πy)
        for y in [0.3, 2.0, 17.0, 150.0] {
            let v = ln_gamma(Complex64::new(0.0, y)).re * 2.0;
            let want = PI.ln() - y.ln() - (PI * y - 2f64.ln() + (1.0 - (-2.0 * PI * y).exp()).ln());
            assert!((v - want).abs() < 1e-11 * want.abs().max(1.0), "y={y}");
        }
    }

    #[test]
    fn product_matches_closed_form() {
        let r = c_function_inv_sq(2.3, 1.1);
        assert!(r.relative_difference.unwrap() < 1e-10, "{r:?}");
        let far = c_function_inv_sq(83.0, -41.5);
        assert!(far.relative_difference.unwrap() < 1e-10, "{far:?}");
    }

    #[test]
    fn walls_vanish_and_poles_flag() {
        for t in [0.7, 3.0, 40.0] {
            assert_eq!(c_inv_sq_closed(t, 0.0), 0.0);
            assert_eq!(c_inv_sq_closed(t, t), 0.0);
            assert!(c_function_inv_sq(t, 0.0).pole_flagged());
        }
    }

    #[test]
    fn normalized_at_minus_i_rho() {
        let c = c_function(&SpectralParameter::i_rho().neg()).unwrap();
        assert!((c - 1.0).norm() < 1e-13, "{c}");
    }

    #[test]
    fn plancherel_density_grows_quartically() {
        let pts: Vec<_> = (1..=100)
            .flat_map(|n| [(1.0, 0.37), (0.6, 0.8)].map(|d| SpectralParameter::with_norm(d, n as f64)))
            .collect();
        let ratio = plancherel_growth_ratio(&pts);
        assert!(ratio.is_finite() && ratio < 1e4, "{ratio}");
    }
}
