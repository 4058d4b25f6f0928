//! Linearization of the phase `k ↦ ⟨H(exp(δX) k), Y⟩`.
//!
//! To first order in `δ` it equals `δ f_{X,Y}(k)` with
//! `f_{X,Y}(k) = ⟨X, Ad_k Y⟩ = 6 Tr(X k Y kᵀ)`. For regular `X` the critical set
//! of `f_{X,Y}` is the normalizer `N_K(𝔞)`, which in `U(2)` consists of the 32
//! monomial matrices with entries in `{±1, ±i}`.

use num_complex::Complex64;
use serde::Serialize;
use sp4_core::group::{cmat2_mul, CMat2, GroupElement};
use sp4_core::CartanVector;

use crate::error::{Result, SphericalError};
use crate::quadrature::HaarRule;
use crate::spherical::{d_of, iwasawa_kernel};
use crate::testfn::slope;

pub const DEFAULT_DELTAS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
pub const EXPONENT_RANGE: (f64, f64) = (1.8, 2.2);
pub const GRADIENT_TOL: f64 = 1e-6;
/// Frobenius distance to `N_K(𝔞)` treated as near the critical set.
pub const CRITICAL_NEIGHBOURHOOD: f64 = 0.2;
const DIFF_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct PhaseProbe {
    pub x: CartanVector,
    pub y: CartanVector,
    /// Level of the Haar rule whose nodes form the `k`-grid.
    pub resolution: u32,
    pub deltas: Vec<f64>,
}

impl PhaseProbe {
    /// Normalizes `x` and `y` to unit Killing norm.
    pub fn new(x: CartanVector, y: CartanVector, resolution: u32, deltas: Vec<f64>) -> Result<Self> {
        let unit = |v: CartanVector| {
            let n = v.killing_norm();
            if n > 0.0 {
                Ok(CartanVector::new(v.t1 / n, v.t2 / n))
            } else {
                Err(SphericalError::Invalid("probe vectors must be nonzero".into()))
            }
        };
        if deltas.len() < 2 || deltas.iter().any(|d| !(*d > 0.0)) {
            return Err(SphericalError::Invalid("need at least two positive deltas".into()));
        }
        Ok(Self { x: unit(x)?, y: unit(y)?, resolution, deltas })
    }

    pub fn with_defaults(x: CartanVector, y: CartanVector) -> Result<Self> {
        Self::new(x, y, 2, DEFAULT_DELTAS.to_vec())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseReport {
    pub x: CartanVector,
    pub y: CartanVector,
    pub f_at_identity: f64,
    /// `(δ, max_k |⟨H(exp(δX)k), Y⟩ − δ f_{X,Y}(k)|)`.
    pub remainders: Vec<(f64, f64)>,
    pub fitted_exponent: f64,
    /// Largest gradient norm over `N_K(𝔞)`.
    pub max_critical_gradient: f64,
    /// Smallest gradient norm on grid points away from `N_K(𝔞)`.
    pub min_gradient_off_critical: f64,
    pub grid_points: usize,
}

impl PhaseReport {
    pub fn exponent_ok(&self) -> bool {
        (EXPONENT_RANGE.0..=EXPONENT_RANGE.1).contains(&self.fitted_exponent)
    }

    pub fn passed(&self) -> bool {
        self.exponent_ok() && self.max_critical_gradient <= GRADIENT_TOL && self.min_gradient_off_critical > 0.0
    }
}

fn diag_entries(h: &CartanVector) -> [f64; 4] {
    [h.t1, h.t2, -h.t1, -h.t2]
}

/// `f_{X,Y}(k) = 6 Tr(X k Y kᵀ)`.
pub fn f_xy(x: &CartanVector, y: &CartanVector, u: &CMat2) -> f64 {
    let k = GroupElement::from_unitary(u);
    let k = k.entries();
    let (dx, dy) = (diag_entries(x), diag_entries(y));
    let mut tr = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            tr += dx[i] * k[i][j] * dy[j] * k[i][j];
        }
    }
    6.0 * tr
}

/// `⟨H(exp(a) k), Y⟩`.
pub fn phase(a: &CartanVector, y: &CartanVector, u: &CMat2) -> f64 {
    let h = iwasawa_kernel(u, d_of(a));
    CartanVector::new(h[0], h[1]).killing_dot(y)
}

/// Basis of `𝔲(2)`.
pub fn k_basis() -> [CMat2; 4] {
    let (z, o, i) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::i());
    [[[i, z], [z, z]], [[z, z], [z, i]], [[z, o], [-o, z]], [[z, i], [i, z]]]
}

/// `exp(Z)` for a 2×2 complex matrix, by scaling and squaring a Taylor series.
pub fn cmat2_exp(z: &CMat2) -> CMat2 {
    let norm: f64 = z.iter().flatten().map(|c| c.norm()).sum();
    let squarings = norm.log2().ceil().max(0.0) as u32 + 1;
    let s = 0.5f64.powi(squarings as i32);
    let a = [[z[0][0] * s, z[0][1] * s], [z[1][0] * s, z[1][1] * s]];
    let one = Complex64::new(1.0, 0.0);
    let mut result = [[one, Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), one]];
    let mut term = result;
    for n in 1..20 {
        term = cmat2_mul(&term, &a);
        for r in term.iter_mut().flatten() {
            *r /= n as f64;
        }
        for i in 0..2 {
            for j in 0..2 {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = cmat2_mul(&result, &result);
    }
    result
}

fn scaled(z: &CMat2, s: f64) -> CMat2 {
    [[z[0][0] * s, z[0][1] * s], [z[1][0] * s, z[1][1] * s]]
}

/// Central-difference gradient of `f_{X,Y}` at `U` along [`k_basis`].
pub fn gradient(x: &CartanVector, y: &CartanVector, u: &CMat2) -> [f64; 4] {
    let mut g = [0.0; 4];
    for (gi, z) in g.iter_mut().zip(k_basis()) {
        let plus = cmat2_mul(u, &cmat2_exp(&scaled(&z, DIFF_STEP)));
        let minus = cmat2_mul(u, &cmat2_exp(&scaled(&z, -DIFF_STEP)));
        *gi = (f_xy(x, y, &plus) - f_xy(x, y, &minus)) / (2.0 * DIFF_STEP);
    }
    g
}

/// The 32 elements of `N_K(𝔞)` as unitary matrices.
pub fn normalizer() -> Vec<CMat2> {
    let units = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), Complex64::i(), -Complex64::i()];
    let z = Complex64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(32);
    for a in units {
        for b in units {
            out.push([[a, z], [z, b]]);
            out.push([[z, a], [b, z]]);
        }
    }
    out
}

fn distance_to_normalizer(u: &CMat2, n: &[CMat2]) -> f64 {
    n.iter()
        .map(|m| (0..2).flat_map(|i| (0..2).map(move |j| (u[i][j] - m[i][j]).norm_sqr())).sum::<f64>().sqrt())
        .fold(f64::INFINITY, f64::min)
}

fn norm4(g: &[f64; 4]) -> f64 {
    g.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn phase_probe(probe: &PhaseProbe) -> Result<PhaseReport> {
    let (x, y) = (&probe.x, &probe.y);
    let mut grid = Vec::new();
    HaarRule::even(probe.resolution)?.for_each(|u, _| grid.push(*u));
    let remainders: Vec<(f64, f64)> = probe
        .deltas
        .iter()
        .map(|&delta| {
            let a = CartanVector::new(delta * x.t1, delta * x.t2);
            let r = grid.iter().map(|u| (phase(&a, y, u) - delta * f_xy(x, y, u)).abs()).fold(0.0, f64::max);
            (delta, r)
        })
        .collect();
    let (lx, ly): (Vec<f64>, Vec<f64>) = remainders.iter().map(|(d, r)| (d.ln(), r.max(f64::MIN_POSITIVE).ln())).unzip();
    let normal = normalizer();
    let max_critical_gradient = normal.iter().map(|n| norm4(&gradient(x, y, n))).fold(0.0, f64::max);
    let min_gradient_off_critical = grid
        .iter()
        .filter(|u| distance_to_normalizer(u, &normal) > CRITICAL_NEIGHBOURHOOD)
        .map(|u| norm4(&gradient(x, y, u)))
        .fold(f64::INFINITY, f64::min);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    Ok(PhaseReport {
        x: *x,
        y: *y,
        f_at_identity: f_xy(x, y, &[[one, zero], [zero, one]]),
        remainders,
        fitted_exponent: slope(&lx, &ly),
        max_critical_gradient,
        min_gradient_off_critical,
        grid_points: grid.len(),
    })
}

/// `count` probes with random regular unit directions.
pub fn random_probes<R: rand::Rng>(rng: &mut R, count: usize) -> Result<Vec<PhaseProbe>> {
    let mut regular = || loop {
        let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        // distance to the walls θ ∈ (π/4)ℤ
        let off = (th / std::f64::consts::FRAC_PI_4).fract();
        if off > 0.1 && off < 0.9 {
            return CartanVector::new(th.cos(), th.sin());
        }
    };
    (0..count).map(|_| PhaseProbe::with_defaults(regular(), regular())).collect()
}
