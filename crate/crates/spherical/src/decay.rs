//! Scan of `s = (1 + ‖λ‖‖H‖)^{1/2} |φ_λ(exp H)|` over tempered `λ` and small `H`.

use std::path::Path;

use serde::Serialize;
use sp4_core::CartanVector;

use crate::error::{Result, SphericalError};
use crate::spectral::SpectralParameter;
use crate::spherical::{auto_level, phi_from};
use crate::testfn::slope;

/// Allowed excess of any grid point over the calibrated constant.
pub const EXCESS_FACTOR: f64 = 1.5;
pub const MAX_FAR_SLOPE: f64 = -0.45;
/// Allowed relative change of the constant between consecutive levels.
pub const LEVEL_STABILITY: f64 = 0.01;

#[derive(Debug, Clone, Serialize)]
pub struct DecayGrid {
    /// Killing norms of `λ`.
    pub lambda_norms: Vec<f64>,
    pub lambda_dirs: Vec<(f64, f64)>,
    /// Killing norms of `H`; zero gives the identity rows.
    pub h_norms: Vec<f64>,
    pub h_dirs: Vec<(f64, f64)>,
    /// Additional `(λ, H)` pairs.
    pub extra: Vec<(SpectralParameter, CartanVector)>,
    /// `C_emp` is the maximum of `s` over rows with `‖λ‖` at most this.
    pub calibration_norm: f64,
    /// Rows with `‖λ‖‖H‖` at least this enter the regression.
    pub far_threshold: f64,
    /// Added to the automatic level of every row.
    pub level_offset: i32,
}

impl Default for DecayGrid {
    fn default() -> Self {
        Self {
            lambda_norms: vec![5.0, 10.0, 15.0, 20.0, 30.0, 40.0, 50.0, 60.0],
            lambda_dirs: vec![(1.0, 0.0), (1.0, 1.0), (0.8, 0.35), (0.55, 0.45)],
            h_norms: vec![0.0, 0.01, 0.03, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0],
            h_dirs: vec![(0.9, 0.3), (1.0, 1.0)],
            extra: vec![(SpectralParameter::real(40.0, 0.0), CartanVector::with_killing_norm((0.9, 0.3), 0.1))],
            calibration_norm: 30.0,
            far_threshold: 8.0,
            level_offset: 0,
        }
    }
}

impl DecayGrid {
    /// A small grid for smoke tests.
    pub fn small() -> Self {
        Self {
            lambda_norms: vec![5.0, 10.0, 20.0],
            lambda_dirs: vec![(1.0, 0.0), (1.0, 1.0), (0.8, 0.35)],
            h_norms: vec![0.0, 0.1, 0.3, 0.6],
            h_dirs: vec![(0.9, 0.3)],
            extra: Vec::new(),
            calibration_norm: 10.0,
            far_threshold: 4.0,
            level_offset: 0,
        }
    }

    pub fn points(&self) -> Vec<(SpectralParameter, CartanVector)> {
        let mut out = Vec::new();
        for &d in &self.lambda_dirs {
            for &n in &self.lambda_norms {
                let l = SpectralParameter::with_norm(d, n);
                for &hn in &self.h_norms {
                    if hn == 0.0 {
                        out.push((l, CartanVector::new(0.0, 0.0)));
                        continue;
                    }
                    for &hd in &self.h_dirs {
                        out.push((l, CartanVector::with_killing_norm(hd, hn)));
                    }
                }
            }
        }
        out.extend(self.extra.iter().copied());
        out
    }
}

/// One CSV row.
#[derive(Debug, Clone, Serialize)]
pub struct DecayRow {
    pub lambda1: f64,
    pub lambda2: f64,
    pub t1: f64,
    pub t2: f64,
    pub abs_phi: f64,
    pub statistic: f64,
    pub quadrature_error: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub rows: Vec<DecayRow>,
    pub c_emp: f64,
    /// `C_emp` from the previous quadrature level.
    pub c_emp_coarse: f64,
    pub level_stability: f64,
    pub max_statistic: f64,
    pub max_identity_statistic: f64,
    pub far_slope: f64,
    pub far_points: usize,
    pub flagged_rows: usize,
}

impl DecayReport {
    pub fn passed(&self) -> bool {
        self.max_statistic <= EXCESS_FACTOR * self.c_emp
            && self.max_identity_statistic <= 1.0 + 1e-6
            && self.far_slope <= MAX_FAR_SLOPE
            && self.level_stability <= LEVEL_STABILITY
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn decay_scan(grid: &DecayGrid) -> Result<DecayReport> {
    let points = grid.points();
    if points.is_empty() {
        return Err(SphericalError::Invalid("empty decay grid".into()));
    }
    let mut rows = Vec::with_capacity(points.len());
    let (mut c_emp, mut c_emp_coarse) = (0.0f64, 0.0f64);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let mut max_identity_statistic = 0.0f64;
    for (l, h) in &points {
        let level = (auto_level(l, h) as i32 + grid.level_offset).max(1) as u32;
        let v = phi_from(l, h, level)?;
        let prod = l.norm() * h.killing_norm();
        let weight = (1.0 + prod).sqrt();
        let statistic = weight * v.value.norm();
        if l.norm() <= grid.calibration_norm + 1e-9 {
            c_emp = c_emp.max(statistic);
            c_emp_coarse = c_emp_coarse.max(weight * v.coarse.norm());
        }
        if prod == 0.0 {
            max_identity_statistic = max_identity_statistic.max(statistic);
        }
        if prod >= grid.far_threshold {
            xs.push(prod.ln());
            ys.push(v.value.norm().max(1e-300).ln());
        }
        rows.push(DecayRow {
            lambda1: l.lambda1.re,
            lambda2: l.lambda2.re,
            t1: h.t1,
            t2: h.t2,
            abs_phi: v.value.norm(),
            statistic,
            quadrature_error: v.error,
            flagged: v.flagged,
        });
    }
    let max_statistic = rows.iter().map(|r| r.statistic).fold(0.0, f64::max);
    let far_slope = if xs.len() >= 2 { slope(&xs, &ys) } else { f64::NAN };
    Ok(DecayReport {
        flagged_rows: rows.iter().filter(|r| r.flagged).count(),
        rows,
        c_emp,
        c_emp_coarse,
        level_stability: (c_emp - c_emp_coarse).abs() / c_emp,
        max_statistic,
        max_identity_statistic,
        far_slope,
        far_points: xs.len(),
    })
}
