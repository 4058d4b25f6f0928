//! Spherical-function sanity checks, `c`-function comparison, test-function
//! suite and decay scan.

use std::f64::consts::TAU;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sp4_core::CartanVector;
use sp4_spherical::cfunction::{c_function_inv_sq, c_inv_sq_closed};
use sp4_spherical::decay::{decay_scan, DecayGrid, DecayReport, EXCESS_FACTOR};
use sp4_spherical::inverse::{default_points, inverse_transform_sample, InverseConfig};
use sp4_spherical::testfn::{check_test_function, TestFunctionChecks, TestFunctionSpec};
use sp4_spherical::{phi, SpectralParameter};

use crate::error::{CliError, Result};
use crate::manifest::{write_json, Outcome, SCHEMA_VERSION};

pub const IDENTITY_TOL: f64 = 1e-10;
pub const I_RHO_TOL: f64 = 1e-8;
pub const SYMMETRY_TOL: f64 = 1e-6;
pub const BOUND_TOL: f64 = 1e-6;
pub const C_FUNCTION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct SanityConfig {
    pub seed: u64,
    pub identity_samples: usize,
    pub i_rho_samples: usize,
    pub symmetry_samples: usize,
    /// Largest `‖λ‖‖H‖` of the symmetry samples.
    pub symmetry_max_product: f64,
    pub bound_samples: usize,
    pub bound_lambda_max: f64,
    pub bound_h_max: f64,
}

impl Default for SanityConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            identity_samples: 10,
            i_rho_samples: 20,
            symmetry_samples: 50,
            symmetry_max_product: 10.0,
            bound_samples: 100,
            bound_lambda_max: 50.0,
            bound_h_max: 2.0,
        }
    }
}

impl SanityConfig {
    /// Fewer samples at smaller `‖λ‖`, for smoke runs.
    pub fn quick(seed: u64) -> Self {
        Self { seed, identity_samples: 4, i_rho_samples: 5, symmetry_samples: 10, bound_samples: 10, bound_lambda_max: 20.0, ..Self::default() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SanityReport {
    pub max_identity_error: f64,
    pub max_i_rho_error: f64,
    pub max_weyl_deviation: f64,
    pub max_negation_deviation: f64,
    pub max_abs_phi: f64,
    pub samples: usize,
}

impl SanityReport {
    pub fn identity_ok(&self) -> bool {
        self.max_identity_error <= IDENTITY_TOL && self.max_i_rho_error <= I_RHO_TOL
    }

    pub fn symmetry_ok(&self) -> bool {
        self.max_weyl_deviation <= SYMMETRY_TOL && self.max_negation_deviation <= SYMMETRY_TOL
    }

    pub fn bound_ok(&self) -> bool {
        self.max_abs_phi <= 1.0 + BOUND_TOL
    }
}

fn unit_direction(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let th: f64 = rng.gen_range(0.0..TAU);
    (th.cos(), th.sin())
}

fn random_lambda(rng: &mut ChaCha8Rng, max_norm: f64) -> SpectralParameter {
    let d = unit_direction(rng);
    SpectralParameter::with_norm(d, rng.gen_range(0.0..=max_norm))
}

fn random_h(rng: &mut ChaCha8Rng, max_norm: f64) -> CartanVector {
    let d = unit_direction(rng);
    CartanVector::with_killing_norm(d, rng.gen_range(0.0..=max_norm))
}

pub fn sanity_checks(cfg: &SanityConfig) -> Result<SanityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let e = CartanVector::new(0.0, 0.0);
    let mut max_identity_error = 0.0f64;
    for _ in 0..cfg.identity_samples {
        let l = random_lambda(&mut rng, cfg.bound_lambda_max);
        max_identity_error = max_identity_error.max((phi(&l, &e)?.value - 1.0).norm());
    }
    let mut max_i_rho_error = 0.0f64;
    for _ in 0..cfg.i_rho_samples {
        let h = random_h(&mut rng, cfg.bound_h_max);
        max_i_rho_error = max_i_rho_error.max((phi(&SpectralParameter::i_rho(), &h)?.value - 1.0).norm());
    }
    let (mut max_weyl_deviation, mut max_negation_deviation) = (0.0f64, 0.0f64);
    for _ in 0..cfg.symmetry_samples {
        let h = random_h(&mut rng, 1.0);
        let lmax = cfg.symmetry_max_product / h.killing_norm().max(1e-3);
        let l = random_lambda(&mut rng, lmax.min(cfg.bound_lambda_max));
        let base = phi(&l, &h)?.value;
        let w: usize = rng.gen_range(1..8);
        max_weyl_deviation = max_weyl_deviation.max((phi(&l.weyl(w), &h)?.value - base).norm());
        max_negation_deviation = max_negation_deviation.max((phi(&l.neg(), &h)?.value - base).norm());
    }
    let mut max_abs_phi = 0.0f64;
    for _ in 0..cfg.bound_samples {
        let l = random_lambda(&mut rng, cfg.bound_lambda_max);
        let h = random_h(&mut rng, cfg.bound_h_max);
        max_abs_phi = max_abs_phi.max(phi(&l, &h)?.value.norm());
    }
    Ok(SanityReport {
        max_identity_error,
        max_i_rho_error,
        max_weyl_deviation,
        max_negation_deviation,
        max_abs_phi,
        samples: cfg.identity_samples + cfg.i_rho_samples + cfg.symmetry_samples + cfg.bound_samples,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CFunctionReport {
    pub points: usize,
    pub skipped_poles: usize,
    pub max_relative_difference: f64,
    /// Largest `|closed form|` on the wall samples.
    pub max_wall_value: f64,
}

impl CFunctionReport {
    pub fn passed(&self) -> bool {
        self.max_relative_difference <= C_FUNCTION_TOL && self.max_wall_value == 0.0
    }
}

/// Product formula against the closed form on `points` pole-free real parameters
/// with coordinates in `[−range, range]`, and the closed form on the walls.
pub fn c_function_comparison(points: usize, range: f64, seed: u64, csv_path: Option<&Path>) -> Result<CFunctionReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut writer = csv_path.map(csv::Writer::from_path).transpose()?;
    let (mut done, mut skipped_poles, mut max_rel) = (0, 0, 0.0f64);
    while done < points {
        let (l1, l2) = (rng.gen_range(-range..range), rng.gen_range(-range..range));
        let r = c_function_inv_sq(l1, l2);
        let Some(rel) = r.relative_difference else {
            skipped_poles += 1;
            continue;
        };
        max_rel = max_rel.max(rel);
        if let Some(w) = writer.as_mut() {
            w.serialize(r)?;
        }
        done += 1;
    }
    if let Some(mut w) = writer {
        w.flush()?;
    }
    let mut max_wall_value = 0.0f64;
    for _ in 0..points.max(1) {
        let t: f64 = rng.gen_range(-range..range);
        for (a, b) in [(t, 0.0), (0.0, t), (t, t), (t, -t)] {
            max_wall_value = max_wall_value.max(c_inv_sq_closed(a, b).abs());
        }
    }
    Ok(CFunctionReport { points, skipped_poles, max_relative_difference: max_rel, max_wall_value })
}

#[derive(Debug, Clone, Serialize)]
pub struct SphericalArgs {
    pub lambda_max: f64,
    pub walls_only: bool,
    pub quick: bool,
    pub c_points: usize,
    pub seed: u64,
    pub mu: (f64, f64),
    pub skip_test_function: bool,
}

impl Default for SphericalArgs {
    fn default() -> Self {
        Self {
            lambda_max: 60.0,
            walls_only: false,
            quick: false,
            c_points: 1000,
            seed: 7,
            mu: (12.0, 5.0),
            skip_test_function: false,
        }
    }
}

/// Wall directions `λ₂ = 0` and `λ₁ = λ₂`.
pub const WALL_DIRECTIONS: [(f64, f64); 2] = [(1.0, 0.0), (1.0, 1.0)];

/// The decay grid selected by the flags.
pub fn decay_grid(args: &SphericalArgs) -> Result<DecayGrid> {
    if !(args.lambda_max >= 0.0) || !args.lambda_max.is_finite() {
        return Err(CliError::Usage(format!("--lambda-max must be a non-negative number, got {}", args.lambda_max)));
    }
    let mut grid = if args.quick { DecayGrid::small() } else { DecayGrid::default() };
    if args.lambda_max == 0.0 {
        grid.lambda_norms = vec![0.0];
        grid.lambda_dirs.truncate(1);
        grid.extra.clear();
    } else {
        grid.lambda_norms.retain(|&n| n <= args.lambda_max);
        grid.extra.retain(|(l, _)| l.norm() <= args.lambda_max);
        if grid.lambda_norms.is_empty() {
            return Err(CliError::Usage(format!("--lambda-max {} is below the smallest grid norm", args.lambda_max)));
        }
    }
    if args.walls_only {
        grid.lambda_dirs = WALL_DIRECTIONS.to_vec();
        grid.extra.retain(|(l, _)| {
            let [a, b] = l.re();
            b == 0.0 || a == b
        });
    }
    Ok(grid)
}

#[derive(Debug, Clone, Serialize)]
pub struct SphericalReport {
    pub schema_version: u32,
    pub args: SphericalArgs,
    pub sanity: SanityReport,
    pub c_function: CFunctionReport,
    pub test_function: Option<TestFunctionChecks>,
    pub inverse_passed: Option<bool>,
    pub inverse_max_reality_residue: Option<f64>,
    pub inverse_max_decay_ratio: Option<f64>,
    pub c_emp: f64,
    pub max_statistic: f64,
    pub max_identity_statistic: f64,
    pub far_slope: f64,
    pub far_points: usize,
    pub level_stability: f64,
    pub rows: usize,
}

/// Checks of the decay scan; the degenerate grid `‖λ‖ = 0` only bounds `|φ₀|`.
pub fn decay_checks(args: &SphericalArgs, report: &DecayReport, outcome: &mut Outcome) {
    let bounded = report.max_statistic <= EXCESS_FACTOR * report.c_emp;
    let detail = format!(
        "C_emp = {:.6}, max s = {:.6}, far slope = {:.4} over {} rows",
        report.c_emp, report.max_statistic, report.far_slope, report.far_points
    );
    if args.lambda_max == 0.0 {
        outcome.check("decay scan: |phi_0| <= 1", report.max_statistic <= 1.0 + BOUND_TOL, detail);
    } else if args.walls_only {
        outcome.check("decay scan: wall directions bounded by 1.5 C_emp", bounded && report.max_identity_statistic <= 1.0 + BOUND_TOL, detail);
    } else {
        outcome.check("decay scan", report.passed(), detail);
    }
}

pub fn run_spherical(args: &SphericalArgs, out_dir: &Path) -> Result<(SphericalReport, Outcome)> {
    let grid = decay_grid(args)?;
    std::fs::create_dir_all(out_dir)?;
    let mut outcome = Outcome::default();

    let sanity_cfg = if args.quick { SanityConfig::quick(args.seed) } else { SanityConfig { seed: args.seed, ..SanityConfig::default() } };
    let sanity = sanity_checks(&sanity_cfg)?;
    outcome.check(
        "phi at the identity and at i*rho",
        sanity.identity_ok(),
        format!("{:.2e}, {:.2e}", sanity.max_identity_error, sanity.max_i_rho_error),
    );
    outcome.check(
        "Weyl and -lambda symmetry",
        sanity.symmetry_ok(),
        format!("{:.2e}, {:.2e}", sanity.max_weyl_deviation, sanity.max_negation_deviation),
    );
    outcome.check("|phi| <= 1 on tempered samples", sanity.bound_ok(), format!("max |phi| = {:.9}", sanity.max_abs_phi));

    let c_path = out_dir.join("cfunction.csv");
    let c_function = c_function_comparison(args.c_points, 60.0, args.seed, Some(&c_path))?;
    outcome.files.push(c_path);
    outcome.check(
        "c-function product vs closed form",
        c_function.passed(),
        format!("max relative difference {:.2e}, wall max {}", c_function.max_relative_difference, c_function.max_wall_value),
    );

    let (mut test_function, mut inverse) = (None, None);
    if !args.skip_test_function {
        let spec = TestFunctionSpec::with_default_order(SpectralParameter::real(args.mu.0, args.mu.1))?;
        let checks = check_test_function(&spec)?;
        outcome.check(
            "test function suite",
            checks.passed(),
            format!("positivity min {:.3e}, big min {:.3}, decay order {:.2}", checks.positivity_min, checks.big_min, checks.decay_order),
        );
        test_function = Some(checks);
        let inv = inverse_transform_sample(&spec, &default_points(), &InverseConfig::default())?;
        outcome.check(
            "inverse transform reality and support decay",
            inv.passed(),
            format!("reality {:.2e}, decay ratio {:.2e}", inv.max_reality_residue, inv.max_decay_ratio),
        );
        inverse = Some(inv);
    }

    let decay = decay_scan(&grid)?;
    let decay_path = out_dir.join("decay.csv");
    decay.write_csv(&decay_path)?;
    outcome.files.push(decay_path);
    decay_checks(args, &decay, &mut outcome);

    let report = SphericalReport {
        schema_version: SCHEMA_VERSION,
        args: args.clone(),
        sanity,
        c_function,
        test_function,
        inverse_passed: inverse.as_ref().map(|i| i.passed()),
        inverse_max_reality_residue: inverse.as_ref().map(|i| i.max_reality_residue),
        inverse_max_decay_ratio: inverse.as_ref().map(|i| i.max_decay_ratio),
        c_emp: decay.c_emp,
        max_statistic: decay.max_statistic,
        max_identity_statistic: decay.max_identity_statistic,
        far_slope: decay.far_slope,
        far_points: decay.far_points,
        level_stability: decay.level_stability,
        rows: decay.rows.len(),
    };
    let path = out_dir.join("spherical.json");
    write_json(&path, &report)?;
    outcome.files.push(path);
    Ok((report, outcome))
}
