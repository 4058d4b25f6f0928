//! Counts of `S(g)_δ[m]` over a range of `m` and `δ`.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::context::CountingContext;
use crate::enumerate::{enumerate_s, sigma, EnumerationConfig, DEFAULT_BUDGET, DEFAULT_THETA};
use crate::error::{CountingError, Result};

#[derive(Debug, Clone, Serialize)]
pub struct ScanConfig {
    pub m_values: Vec<i64>,
    pub deltas: Vec<f64>,
    pub theta: f64,
    /// Budget of each single enumeration.
    pub budget: u128,
}

impl ScanConfig {
    pub fn new(m_values: Vec<i64>, deltas: Vec<f64>) -> Result<Self> {
        let cfg = Self { m_values, deltas, theta: DEFAULT_THETA, budget: DEFAULT_BUDGET };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_values.is_empty() || self.deltas.is_empty() {
            return Err(CountingError::Invalid("empty m-range or delta list".into()));
        }
        if self.m_values.iter().any(|&m| m < 1) {
            return Err(CountingError::Invalid("m must be positive".into()));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) || self.budget == 0 {
            return Err(CountingError::Invalid("theta must lie in (0, 1) and the budget must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub m: i64,
    pub delta: f64,
    pub count: u64,
    pub seconds: f64,
    pub budget_hit: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    /// Slope of `log count` against `log m` at the smallest `δ`.
    pub slope: f64,
    pub slope_delta: f64,
    /// Counts are non-increasing as `δ` decreases at each fixed `m`.
    pub monotone_in_delta: bool,
    /// Rows with odd `m` and `count < 8σ(m)`.
    pub lower_bound_failures: Vec<(i64, f64)>,
}

impl ScanReport {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn budget_hit(&self) -> bool {
        self.rows.iter().any(|r| r.budget_hit)
    }
}

/// Least-squares slope.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

pub fn prop1_scan(ctx: &CountingContext, config: &ScanConfig) -> Result<ScanReport> {
    config.validate()?;
    let ecfg = EnumerationConfig { theta: config.theta, budget: config.budget };
    let mut rows = Vec::new();
    for &m in &config.m_values {
        for &delta in &config.deltas {
            let start = Instant::now();
            let (count, budget_hit) = match enumerate_s(ctx, delta, m, &ecfg) {
                Ok(e) => (e.matrices.len() as u64, false),
                Err(CountingError::Budget { .. }) => (0, true),
                Err(e) => return Err(e),
            };
            rows.push(ScanRow { m, delta, count, seconds: start.elapsed().as_secs_f64(), budget_hit });
        }
    }
    let slope_delta = config.deltas.iter().copied().fold(f64::INFINITY, f64::min);
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.delta == slope_delta && r.count > 0 && !r.budget_hit)
        .map(|r| ((r.m as f64).ln(), (r.count as f64).ln()))
        .unzip();
    let slope = if xs.len() >= 2 { fit_slope(&xs, &ys) } else { f64::NAN };
    let monotone_in_delta = config.m_values.iter().all(|&m| {
        let mut at_m: Vec<_> = rows.iter().filter(|r| r.m == m && !r.budget_hit).collect();
        at_m.sort_by(|a, b| a.delta.total_cmp(&b.delta));
        at_m.windows(2).all(|w| w[0].count <= w[1].count)
    });
    let lower_bound_failures = rows
        .iter()
        .filter(|r| r.m % 2 == 1 && !r.budget_hit && r.count < 8 * sigma(r.m as u64))
        .map(|r| (r.m, r.delta))
        .collect();
    Ok(ScanReport { rows, slope, slope_delta, monotone_in_delta, lower_bound_failures })
}
