//! The spectral test function `f̃_μ(λ) = (Σ_{w∈W} ψ(μ − w.λ))²`.
//!
//! `ψ(λ) = c_ψ Σ_w h((w.λ)₁) h((w.λ)₂)` with `h(z) = (sin(εz)/(εz))^M`. Since `h`
//! is even the Weyl sum is `8 c_ψ h(λ₁) h(λ₂)`. `Re ψ` is pluriharmonic, so its
//! minimum over a ball is attained on the boundary sphere, where `c_ψ` is
//! calibrated.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, SphericalError};
use crate::spectral::{SpectralParameter, SpectrumRegion, EXCEPTIONAL_BOUND};

pub const DEFAULT_ORDER: u32 = 8;
/// Radius of the coordinate ball on which `Re ψ ≥ 1` is enforced. It contains
/// every exceptional imaginary part allowed by the spectrum region.
pub const CALIBRATION_RADIUS: f64 = 2.236_067_977_499_79;
/// Margin applied on top of the sampled minimum.
const CALIBRATION_SAFETY: f64 = 1.01;
const SPHERE_GRID: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestFunctionSpec {
    pub mu: SpectralParameter,
    /// Even power `M` of the sinc factor.
    pub order: u32,
    pub eps: f64,
    pub c_psi: f64,
    pub radius: f64,
}

/// `(sin(εz)/(εz))^M`.
pub fn sinc_power(z: Complex64, eps: f64, order: u32) -> Complex64 {
    let x = z * eps;
    let s = if x.norm() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    };
    s.powu(order)
}

impl TestFunctionSpec {
    /// Spec with `ε = 1/(2M)` and `c_ψ` calibrated on the sphere of radius
    /// [`CALIBRATION_RADIUS`].
    pub fn calibrated(mu: SpectralParameter, order: u32) -> Result<Self> {
        if order < 2 || order % 2 != 0 {
            return Err(SphericalError::Invalid(format!("sinc order {order} must be even and at least 2")));
        }
        if !mu.is_real() {
            return Err(SphericalError::Invalid("mu must be real".into()));
        }
        let mut spec = Self { mu, order, eps: 1.0 / (2.0 * order as f64), c_psi: 1.0, radius: CALIBRATION_RADIUS };
        let min = spec.sphere_minimum(SPHERE_GRID);
        if min <= 0.0 {
            return Err(SphericalError::Invalid(format!("Re ψ has minimum {min} on the calibration sphere")));
        }
        spec.c_psi = CALIBRATION_SAFETY / min;
        Ok(spec)
    }

    pub fn with_default_order(mu: SpectralParameter) -> Result<Self> {
        Self::calibrated(mu, DEFAULT_ORDER)
    }

    /// Same `ψ`, centered at another `μ`.
    pub fn with_mu(&self, mu: SpectralParameter) -> Self {
        Self { mu, ..*self }
    }

    /// Exponential type of `h`, which bounds that of `ψ` in each coordinate.
    pub fn exponential_type(&self) -> f64 {
        self.order as f64 * self.eps
    }

    pub fn h(&self, z: Complex64) -> Complex64 {
        sinc_power(z, self.eps, self.order)
    }

    pub fn psi(&self, l: &SpectralParameter) -> Complex64 {
        self.h(l.lambda1) * self.h(l.lambda2) * (8.0 * self.c_psi)
    }

    /// `min Re ψ` over a grid on the sphere `|λ₁|² + |λ₂|² = radius²`.
    pub fn sphere_minimum(&self, n: usize) -> f64 {
        let mut min = f64::INFINITY;
        for ia in 0..=n {
            let a = PI / 2.0 * ia as f64 / n as f64;
            for i1 in 0..2 * n {
                let t1 = 2.0 * PI * i1 as f64 / (2 * n) as f64;
                for i2 in 0..2 * n {
                    let t2 = 2.0 * PI * i2 as f64 / (2 * n) as f64;
                    let l = SpectralParameter::new(
                        Complex64::from_polar(self.radius * a.cos(), t1),
                        Complex64::from_polar(self.radius * a.sin(), t2),
                    );
                    min = min.min(self.psi(&l).re);
                }
            }
        }
        min
    }

    /// `f̃_μ(λ)`.
    pub fn evaluate(&self, lambda: &SpectralParameter) -> Complex64 {
        let s: Complex64 = lambda.weyl_orbit().iter().map(|wl| self.psi(&self.mu.sub(wl))).sum();
        s * s
    }

    /// `f̃_μ` for real `λ`, where it is real.
    pub fn evaluate_real(&self, l1: f64, l2: f64) -> f64 {
        self.evaluate(&SpectralParameter::real(l1, l2)).re
    }
}

/// Parameters of the property checks.
#[derive(Debug, Clone, Serialize)]
pub struct TestFunctionChecks {
    pub positivity_min: f64,
    pub positivity_max_imaginary: f64,
    pub big_min: f64,
    pub big_min_real: f64,
    pub big_min_conjugate: f64,
    pub big_min_imaginary: f64,
    pub ball_min_re_psi: f64,
    pub weyl_max_deviation: f64,
    pub decay_order: f64,
    pub required_decay_order: f64,
}

impl TestFunctionChecks {
    pub fn passed(&self) -> bool {
        self.positivity_min >= 0.0
            && self.big_min >= 1.0
            && self.ball_min_re_psi >= 1.0
            && self.weyl_max_deviation <= 1e-12
            && self.decay_order >= self.required_decay_order
    }
}

/// Points of the spectrum region used by the positivity check: a real grid and
/// samples of both exceptional families.
fn region_samples(spec: &TestFunctionSpec) -> Vec<SpectralParameter> {
    let (m1, m2) = (spec.mu.lambda1.re, spec.mu.lambda2.re);
    let mut out = Vec::new();
    for i in -40..=40 {
        for j in -40..=40 {
            out.push(SpectralParameter::real(m1 + 1.7 * i as f64, m2 + 1.3 * j as f64));
        }
    }
    for x in (-60..=60).map(|k| k as f64 * 0.85) {
        for y in (-10..=10).map(|k| EXCEPTIONAL_BOUND * k as f64 / 10.0) {
            out.push(SpectrumRegion::conjugate_member(x, y));
            out.push(SpectrumRegion::imaginary_member(x, y));
        }
    }
    out
}

/// Lower bound of `f̃_μ(λ)` on `Re λ = μ` for the three parts of the region,
/// with `x ∈ [10, 200]` on the exceptional families.
fn big_minima(spec: &TestFunctionSpec) -> [f64; 3] {
    let mut real = f64::INFINITY;
    let mut conj = f64::INFINITY;
    let mut imag = f64::INFINITY;
    for x in (0..=95).map(|k| 10.0 + 2.0 * k as f64) {
        // real plane: λ = μ
        for mu in [SpectralParameter::real(x, 0.37 * x), SpectralParameter::real(x, x), SpectralParameter::real(x, 0.0)] {
            real = real.min(spec.with_mu(mu).evaluate(&mu).re);
        }
        let conj_spec = spec.with_mu(SpectralParameter::real(x, -x));
        let imag_spec = spec.with_mu(SpectralParameter::real(0.0, x));
        for y in (-10..=10).map(|k| EXCEPTIONAL_BOUND * k as f64 / 10.0) {
            conj = conj.min(conj_spec.evaluate(&SpectrumRegion::conjugate_member(x, y)).re);
            imag = imag.min(imag_spec.evaluate(&SpectrumRegion::imaginary_member(x, y)).re);
        }
    }
    [real, conj, imag]
}

/// Fitted `A` in `f̃_μ(λ) ≪ (1 + dist(λ, W.μ))^{−A}` from windowed maxima along
/// several rays, using the slope of `log max f̃` against `log(1 + d)`.
pub fn decay_order(spec: &TestFunctionSpec) -> f64 {
    let period = PI / spec.eps;
    let dirs = [(1.0f64, 0.0f64), (0.0, 1.0), (0.7, 0.7), (0.6, -0.8)];
    let mut worst = f64::INFINITY;
    for (a, b) in dirs {
        let n = (a * a + b * b).sqrt();
        let (a, b) = (a / n, b / n);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut d = 8.0 * period;
        while d < 80.0 * period {
            // maximum over one full period of the sinc factor
            let mut max = 0.0f64;
            for k in 0..200 {
                let s = d + period * k as f64 / 200.0;
                let l = SpectralParameter::real(spec.mu.lambda1.re + s * a, spec.mu.lambda2.re + s * b);
                max = max.max(spec.evaluate(&l).re.abs());
            }
            let dist = l_dist(spec, d, a, b);
            xs.push((1.0 + dist).ln());
            ys.push(max.ln());
            d *= 1.25;
        }
        worst = worst.min(-slope(&xs, &ys));
    }
    worst
}

fn l_dist(spec: &TestFunctionSpec, d: f64, a: f64, b: f64) -> f64 {
    let l = SpectralParameter::real(spec.mu.lambda1.re + d * a, spec.mu.lambda2.re + d * b);
    l.weyl_orbit().iter().map(|w| spec.mu.sub(w).coordinate_norm()).fold(f64::INFINITY, f64::min)
}

/// Least-squares slope.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Runs the positivity, lower-bound, calibration, symmetry and decay checks.
pub fn check_test_function(spec: &TestFunctionSpec) -> Result<TestFunctionChecks> {
    let mut positivity_min = f64::INFINITY;
    let mut positivity_max_imaginary = 0.0f64;
    let mut weyl_max_deviation = 0.0f64;
    for l in region_samples(spec) {
        let v = spec.evaluate(&l);
        positivity_min = positivity_min.min(v.re);
        positivity_max_imaginary = positivity_max_imaginary.max(v.im.abs() / v.norm().max(1e-300));
        for wl in l.weyl_orbit() {
            let dev = (spec.evaluate(&wl) - v).norm() / v.norm().max(1.0);
            weyl_max_deviation = weyl_max_deviation.max(dev);
        }
    }
    let [big_min_real, big_min_conjugate, big_min_imaginary] = big_minima(spec);
    // a finer sphere grid than the calibration one
    let ball_min_re_psi = spec.sphere_minimum(2 * SPHERE_GRID + 1);
    Ok(TestFunctionChecks {
        positivity_min,
        positivity_max_imaginary,
        big_min: big_min_real.min(big_min_conjugate).min(big_min_imaginary),
        big_min_real,
        big_min_conjugate,
        big_min_imaginary,
        ball_min_re_psi,
        weyl_max_deviation,
        decay_order: decay_order(spec),
        required_decay_order: spec.order as f64 / 2.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> TestFunctionSpec {
        TestFunctionSpec::with_default_order(SpectralParameter::real(12.0, 5.0)).unwrap()
    }

    #[test]
    fn h_is_nonnegative_with_type_half() {
        let s = spec();
        assert_eq!(s.exponential_type(), 0.5);
        for k in -500..500 {
            assert!(s.h(Complex64::new(k as f64 * 0.37, 0.0)).re >= 0.0);
        }
    }

    #[test]
    fn calibration_covers_exceptional_ball() {
        let s = spec();
        assert!(CALIBRATION_RADIUS >= 2.0f64.sqrt() * EXCEPTIONAL_BOUND - 1e-12);
        assert!(s.sphere_minimum(61) >= 1.0);
        // the center and an interior point
        assert!(s.psi(&SpectralParameter::new(Complex64::new(0.0, 1.2), Complex64::new(0.3, -1.0))).re >= 1.0);
    }

    #[test]
    fn value_at_mu_is_big() {
        let s = spec();
        assert!(s.evaluate(&s.mu).re >= 1.0);
    }

    #[test]
    fn weyl_invariant() {
        let s = spec();
        let l = SpectralParameter::new(Complex64::new(3.1, 0.4), Complex64::new(-7.2, 1.1));
        let v = s.evaluate(&l);
        for w in l.weyl_orbit() {
            assert!((s.evaluate(&w) - v).norm() <= 1e-14 * v.norm());
        }
    }

    #[test]
    fn rejects_bad_orders() {
        let mu = SpectralParameter::real(1.0, 0.0);
        assert!(TestFunctionSpec::calibrated(mu, 7).is_err());
        assert!(TestFunctionSpec::calibrated(SpectralParameter::i_rho(), 8).is_err());
    }

    #[test]
    fn full_check_passes() {
        let c = check_test_function(&spec()).unwrap();
        assert!(c.passed(), "{c:?}");
    }

    #[test]
    fn slope_of_line() {
        assert!((slope(&[0.0, 1.0, 2.0], &[1.0, -1.0, -3.0]) + 2.0).abs() < 1e-14);
    }
}
