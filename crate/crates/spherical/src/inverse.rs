//! Inverse spherical transform of the test function.
//!
//! Exchanging the `λ`- and `K`-integrals gives
//! `f(exp H) = ∫_K e^{−ρ(h_k)} F(h_k) dk` with `h_k = H(exp(H) k)` and
//! `F(h) = (1/|W|) ∫ f̃(λ) |c(λ)|⁻² e^{iλ·h} dλ`. `F` is computed once on a grid by
//! a 2D FFT of the truncated spectral density and interpolated bicubically.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;
use sp4_core::CartanVector;

use crate::cfunction::c_inv_sq_closed;
use crate::error::{Result, SphericalError};
use crate::quadrature::{integrate, HaarRule};
use crate::spherical::{d_of, iwasawa_kernel};
use crate::testfn::TestFunctionSpec;

pub const TRUNCATION_FLAG: f64 = 0.1;
pub const REALITY_TOL: f64 = 1e-6;
pub const SUPPORT_RADIUS: f64 = 2.0;
/// Samples beyond this norm are compared with the peak.
pub const DECAY_NORM: f64 = 2.5;
pub const DECAY_CHECK_NORM: f64 = 3.0;
pub const DECAY_RATIO: f64 = 0.05;
/// Largest FFT grid side.
pub const MAX_FFT_SIZE: usize = 4096;
/// Beyond this level the interpolation error of `F` dominates.
pub const MAX_K_LEVEL: u32 = 8;

#[derive(Debug, Clone, Serialize)]
pub struct InverseConfig {
    /// `f̃` is truncated to `|λ₁|, |λ₂| ≤ cutoff`.
    pub lambda_cutoff: f64,
    pub lambda_step: f64,
    /// FFT side, a multiple of 4.
    pub fft_size: usize,
    /// `K`-quadrature level; chosen from `‖H‖` when `None`.
    pub k_level: Option<u32>,
}

impl Default for InverseConfig {
    fn default() -> Self {
        Self { lambda_cutoff: 160.0, lambda_step: 0.3, fft_size: 2048, k_level: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InverseSample {
    pub t1: f64,
    pub t2: f64,
    /// Euclidean norm of `(t₁, t₂)`.
    pub norm: f64,
    pub value: f64,
    pub imaginary: f64,
    pub quadrature_error: f64,
    pub level: u32,
    /// `|f(exp H)| / f(e)`.
    pub relative: f64,
    /// `|f(exp H)| (1 + ‖μ‖‖H‖)^{1/2} / ‖μ‖⁴` in Killing norms.
    pub mainbound_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InverseReport {
    pub spec: TestFunctionSpec,
    pub config: InverseConfig,
    /// `f(e) = (1/|W|) ∫ f̃ |c|⁻²`.
    pub peak: f64,
    /// Share of `∫ |f̃| |c|⁻²` in the outer fifth of the truncation box.
    pub truncation_estimate: f64,
    pub truncation_flagged: bool,
    pub samples: Vec<InverseSample>,
    pub max_reality_residue: f64,
    /// Largest `|f|/f(e)` beyond [`DECAY_NORM`].
    pub max_decay_ratio: f64,
}

impl InverseReport {
    pub fn reality_ok(&self) -> bool {
        self.max_reality_residue <= REALITY_TOL
    }

    pub fn support_decay_ok(&self) -> bool {
        let at_check: Vec<_> = self.samples.iter().filter(|s| (s.norm - DECAY_CHECK_NORM).abs() < 1e-9).collect();
        !at_check.is_empty() && at_check.iter().all(|s| s.relative <= DECAY_RATIO)
    }

    pub fn passed(&self) -> bool {
        self.peak > 0.0 && !self.truncation_flagged && self.reality_ok() && self.support_decay_ok()
    }
}

/// `F` on the grid `h = (m − N/2) δh`, `δh = 2π/(N Δλ)`.
struct FourierGrid {
    n: usize,
    dh: f64,
    values: Vec<Complex64>,
}

impl FourierGrid {
    fn at(&self, i: isize, j: isize) -> Complex64 {
        let n = self.n as isize;
        if i < 0 || j < 0 || i >= n || j >= n {
            return Complex64::new(0.0, 0.0);
        }
        self.values[i as usize * self.n + j as usize]
    }

    /// Bicubic (Keys, a = −1/2) interpolation.
    fn interpolate(&self, h1: f64, h2: f64) -> Complex64 {
        let half = (self.n / 2) as f64;
        let (x, y) = (h1 / self.dh + half, h2 / self.dh + half);
        let (ix, iy) = (x.floor(), y.floor());
        let (fx, fy) = (x - ix, y - iy);
        let (wx, wy) = (keys(fx), keys(fy));
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, wa) in wx.iter().enumerate() {
            let mut row = Complex64::new(0.0, 0.0);
            for (b, wb) in wy.iter().enumerate() {
                row += self.at(ix as isize + a as isize - 1, iy as isize + b as isize - 1) * *wb;
            }
            acc += row * *wa;
        }
        acc
    }
}

fn keys(t: f64) -> [f64; 4] {
    let k = |s: f64| {
        let s = s.abs();
        if s < 1.0 {
            1.5 * s * s * s - 2.5 * s * s + 1.0
        } else if s < 2.0 {
            -0.5 * s * s * s + 2.5 * s * s - 4.0 * s + 2.0
        } else {
            0.0
        }
    };
    [k(1.0 + t), k(t), k(1.0 - t), k(2.0 - t)]
}

struct Density {
    grid: FourierGrid,
    peak: f64,
    truncation_estimate: f64,
}

fn density(spec: &TestFunctionSpec, cfg: &InverseConfig) -> Result<Density> {
    let n = cfg.fft_size;
    if n % 4 != 0 || n > MAX_FFT_SIZE || !(cfg.lambda_step > 0.0) || !(cfg.lambda_cutoff > 0.0) {
        return Err(SphericalError::Invalid(format!("unusable inverse-transform grid {cfg:?}")));
    }
    if 2.0 * cfg.lambda_cutoff / cfg.lambda_step >= n as f64 {
        return Err(SphericalError::Invalid("cutoff does not fit in the FFT grid".into()));
    }
    let dl = cfg.lambda_step;
    let lam = |j: usize| (j as f64 - (n / 2) as f64) * dl;
    let inner = 0.8 * cfg.lambda_cutoff;
    let mut values = vec![Complex64::new(0.0, 0.0); n * n];
    let (mut total, mut shell, mut sum) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let l1 = lam(i);
        if l1.abs() > cfg.lambda_cutoff {
            continue;
        }
        for j in 0..n {
            let l2 = lam(j);
            if l2.abs() > cfg.lambda_cutoff {
                continue;
            }
            let g = spec.evaluate_real(l1, l2) * c_inv_sq_closed(l1, l2) / 8.0 * dl * dl;
            total += g.abs();
            sum += g;
            if l1.abs().max(l2.abs()) > inner {
                shell += g.abs();
            }
            // (−1)^{i+j} centers the transform
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            values[i * n + j] = Complex64::new(sign * g, 0.0);
        }
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(n);
    for row in values.chunks_exact_mut(n) {
        fft.process(row);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            column[i] = values[i * n + j];
        }
        fft.process(&mut column);
        for i in 0..n {
            values[i * n + j] = column[i];
        }
    }
    for i in 0..n {
        for j in 0..n {
            if (i + j) % 2 == 1 {
                values[i * n + j] = -values[i * n + j];
            }
        }
    }
    let dh = 2.0 * std::f64::consts::PI / (n as f64 * dl);
    Ok(Density { grid: FourierGrid { n, dh, values }, peak: sum, truncation_estimate: shell / total })
}

/// Level of the `K`-rule for `exp H`, from the bandwidth of the density.
pub fn k_level(spec: &TestFunctionSpec, h: &CartanVector) -> u32 {
    let band = spec.mu.coordinate_norm() + 30.0;
    ((band * h.euclidean_norm() / 5.0 + 4.0).ceil() as u32).clamp(2, MAX_K_LEVEL)
}

fn k_integral(grid: &FourierGrid, h: &CartanVector, level: u32) -> Result<Complex64> {
    let d = d_of(h);
    Ok(integrate(&HaarRule::even(level)?, |u| {
        let x = iwasawa_kernel(u, d);
        grid.interpolate(x[0], x[1]) * (-2.0 * x[0] - x[1]).exp()
    }))
}

/// `f_μ(exp H)` at the given points.
pub fn inverse_transform_sample(spec: &TestFunctionSpec, points: &[CartanVector], cfg: &InverseConfig) -> Result<InverseReport> {
    let dens = density(spec, cfg)?;
    let mu_norm = spec.mu.norm();
    let mut samples = Vec::with_capacity(points.len());
    for h in points {
        let level = cfg.k_level.unwrap_or_else(|| k_level(spec, h));
        let fine = k_integral(&dens.grid, h, level + 1)?;
        let coarse = k_integral(&dens.grid, h, level)?;
        samples.push(InverseSample {
            t1: h.t1,
            t2: h.t2,
            norm: h.euclidean_norm(),
            value: fine.re,
            imaginary: fine.im,
            quadrature_error: (fine - coarse).norm(),
            level: level + 1,
            relative: fine.norm() / dens.peak,
            mainbound_ratio: fine.norm() * (1.0 + mu_norm * h.killing_norm()).sqrt() / mu_norm.powi(4),
        });
    }
    let max_reality_residue =
        samples.iter().map(|s| s.imaginary.abs() / s.value.abs().max(f64::MIN_POSITIVE)).fold(0.0, f64::max);
    let max_decay_ratio = samples.iter().filter(|s| s.norm > DECAY_NORM).map(|s| s.relative).fold(0.0, f64::max);
    Ok(InverseReport {
        spec: *spec,
        config: cfg.clone(),
        peak: dens.peak,
        truncation_estimate: dens.truncation_estimate,
        truncation_flagged: dens.truncation_estimate > TRUNCATION_FLAG,
        samples,
        max_reality_residue,
        max_decay_ratio,
    })
}

/// Sample points along two rays, including the identity, the support
/// boundary and points beyond [`DECAY_NORM`].
pub fn default_points() -> Vec<CartanVector> {
    let mut out = vec![CartanVector::new(0.0, 0.0)];
    for (a, b) in [(0.9f64, 0.3f64), (0.6, 0.6)] {
        let e = a.hypot(b);
        for r in [0.5, 1.0, 1.5, 2.6, DECAY_CHECK_NORM] {
            out.push(CartanVector::new(a / e * r, b / e * r));
        }
    }
    out
}
