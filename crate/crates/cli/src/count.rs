//! Counts of `S(g)_δ[m]` with an oracle cross-check at small `m`.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sp4_core::{CartanVector, GroupElement};
use sp4_counting::enumerate::{sigma, DEFAULT_BUDGET};
use sp4_counting::scan::ScanReport;
use sp4_counting::{enumerate_s, naive_enumerate, prop1_scan, CountingContext, EnumerationConfig, ScanConfig};

use crate::error::{CliError, Result};
use crate::manifest::{write_json, Outcome, SCHEMA_VERSION};

pub const DEFAULT_ORACLE_MAX: i64 = 8;
pub const ORACLE_BUDGET: u128 = 2_000_000_000;

/// `a..b` (inclusive) or a single `n`.
pub fn parse_m_range(s: &str) -> Result<Vec<i64>> {
    let parse = |t: &str| t.trim().parse::<i64>().map_err(|e| CliError::Usage(format!("bad m value {t:?}: {e}")));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let n = parse(s)?;
            (n, n)
        }
    };
    if lo < 1 {
        return Err(CliError::Usage(format!("m must be positive, got {lo}")));
    }
    if hi < lo {
        return Err(CliError::Usage(format!("empty m-range {s:?}")));
    }
    Ok((lo..=hi).collect())
}

/// A base point `n(x, S) exp(H)` with small random coordinates.
pub fn random_base_point(seed: u64) -> GroupElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = || rng.gen_range(-0.5..0.5);
    let (n12, s11, s12, s22, t1, t2) = (u(), u(), u(), u(), u(), u());
    GroupElement::unipotent(n12, [[s11, s12], [s12, s22]]).mul(&CartanVector::new(0.6 * t1, 0.6 * t2).exp())
}

#[derive(Debug, Clone, Serialize)]
pub struct CountArgs {
    /// `None` is the identity.
    pub g_seed: Option<u64>,
    pub m_values: Vec<i64>,
    pub deltas: Vec<f64>,
    pub oracle_max: i64,
    pub budget: u128,
}

impl CountArgs {
    pub fn new(m_values: Vec<i64>, deltas: Vec<f64>) -> Self {
        Self { g_seed: None, m_values, deltas, oracle_max: DEFAULT_ORACLE_MAX, budget: DEFAULT_BUDGET }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleRow {
    pub m: i64,
    pub delta: f64,
    pub enumerated: usize,
    pub oracle: usize,
    pub equal: bool,
}

/// Enumeration and naive oracle agree as sets for every `m ≤ oracle_max` in `m_values`.
pub fn oracle_cross_check(ctx: &CountingContext, m_values: &[i64], deltas: &[f64], oracle_max: i64, budget: u128) -> Result<Vec<OracleRow>> {
    let cfg = EnumerationConfig { budget, ..EnumerationConfig::default() };
    let mut rows = Vec::new();
    for &m in m_values.iter().filter(|&&m| m <= oracle_max) {
        for &delta in deltas {
            let fast = enumerate_s(ctx, delta, m, &cfg)?.matrices;
            let slow = naive_enumerate(ctx, delta, m, ORACLE_BUDGET)?;
            rows.push(OracleRow { m, delta, enumerated: fast.len(), oracle: slow.len(), equal: fast == slow });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct CountReport {
    pub schema_version: u32,
    pub g_seed: Option<u64>,
    pub g: [[f64; 4]; 4],
    pub oracle: Vec<OracleRow>,
    pub counts: Vec<(i64, f64, u64, bool)>,
    pub slope: f64,
    pub slope_delta: f64,
    pub monotone_in_delta: bool,
    /// Odd `m` with a count below `8σ(m)`; checked at the identity only.
    pub lower_bound_failures: Vec<(i64, f64)>,
}

#[derive(Debug, Serialize)]
struct CsvRow {
    m: i64,
    delta: f64,
    count: u64,
    lower_bound: Option<u64>,
    budget_hit: bool,
}

pub fn run_count(args: &CountArgs, out_dir: &Path) -> Result<(CountReport, Outcome)> {
    if args.m_values.is_empty() {
        return Err(CliError::Usage("empty m-range".into()));
    }
    if args.deltas.is_empty() {
        return Err(CliError::Usage("empty delta list".into()));
    }
    let g = args.g_seed.map(random_base_point).unwrap_or_else(GroupElement::identity);
    let ctx = CountingContext::new(g)?;
    let config = ScanConfig { budget: args.budget, ..ScanConfig::new(args.m_values.clone(), args.deltas.clone())? };
    std::fs::create_dir_all(out_dir)?;
    let mut outcome = Outcome::default();

    let oracle = oracle_cross_check(&ctx, &args.m_values, &args.deltas, args.oracle_max, args.budget)?;
    if !oracle.is_empty() {
        let bad: Vec<_> = oracle.iter().filter(|r| !r.equal).map(|r| (r.m, r.delta)).collect();
        outcome.check("enumeration equals oracle", bad.is_empty(), format!("{} (m, delta) pairs, mismatches {bad:?}", oracle.len()));
    }

    let scan: ScanReport = prop1_scan(&ctx, &config)?;
    let identity = args.g_seed.is_none();
    let lower_bound_failures = if identity { scan.lower_bound_failures.clone() } else { Vec::new() };
    if identity {
        outcome.check(
            "count >= 8 sigma(m) for odd m",
            lower_bound_failures.is_empty(),
            format!("slope {:.4} at delta {}, failures {lower_bound_failures:?}", scan.slope, scan.slope_delta),
        );
    }
    outcome.check("enumeration within budget", !scan.budget_hit(), format!("{} rows", scan.rows.len()));

    let csv_path = out_dir.join("counts.csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    for r in &scan.rows {
        let lower_bound = (identity && r.m % 2 == 1).then(|| 8 * sigma(r.m as u64));
        w.serialize(CsvRow { m: r.m, delta: r.delta, count: r.count, lower_bound, budget_hit: r.budget_hit })?;
    }
    w.flush()?;
    outcome.files.push(csv_path);

    let report = CountReport {
        schema_version: SCHEMA_VERSION,
        g_seed: args.g_seed,
        g: *ctx.g.entries(),
        oracle,
        counts: scan.rows.iter().map(|r| (r.m, r.delta, r.count, r.budget_hit)).collect(),
        slope: scan.slope,
        slope_delta: scan.slope_delta,
        monotone_in_delta: scan.monotone_in_delta,
        lower_bound_failures,
    };
    let path = out_dir.join("count.json");
    write_json(&path, &report)?;
    outcome.files.push(path);
    Ok((report, outcome))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_ranges() {
        assert_eq!(parse_m_range("1..5").unwrap(), vec![1, 2, 3, 4, 5]);
        assert_eq!(parse_m_range("3..=4").unwrap(), vec![3, 4]);
        assert_eq!(parse_m_range("7").unwrap(), vec![7]);
        for bad in ["5..1", "0..3", "a..b", ""] {
            assert!(matches!(parse_m_range(bad), Err(CliError::Usage(_))), "{bad}");
        }
    }

    #[test]
    fn random_base_point_is_symplectic() {
        let g = random_base_point(3);
        assert!(CountingContext::new(g).is_ok());
        assert_eq!(random_base_point(3).entries(), g.entries());
    }
}
