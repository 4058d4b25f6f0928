use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use sp4_cli::count::{parse_m_range, run_count, CountArgs, DEFAULT_ORACLE_MAX};
use sp4_cli::exponent::exponent_report;
use sp4_cli::hecke::{run_hecke, HeckeArgs};
use sp4_cli::spherical::{run_spherical, SphericalArgs};
use sp4_cli::{CliError, Outcome, RunManifest, EXIT_USAGE, SCHEMA_VERSION};
use sp4_counting::enumerate::DEFAULT_BUDGET;
use sp4_hecke::cache::default_cache_dir;
use sp4_hecke::multiply::Budgets;

#[derive(Parser)]
#[command(name = "sp4", version, about = "Verifications for the Hecke algebra, spherical functions and lattice counts of Sp4")]
struct Cli {
    /// Directory for reports and the run manifest.
    #[arg(long, short = 'o', global = true, default_value = "sp4-out")]
    out: PathBuf,
    /// Coset-table cache directory (default: $SP4_CACHE_DIR or the user cache directory).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hecke identities, Satake rows and homomorphism samples at a prime.
    Hecke(HeckeCmd),
    /// Spherical-function checks and the decay scan.
    Spherical(SphericalCmd),
    /// Counts of integral similitudes near a conjugate of K.
    Count(CountCmd),
    /// Exponent bookkeeping for given eta and B.
    Exponent(ExponentCmd),
}

#[derive(Args)]
struct HeckeCmd {
    #[arg(short = 'p', long)]
    prime: u64,
    /// Largest degree r of T(p^r) in the identity suite.
    #[arg(short = 'r', long, default_value_t = 4)]
    rmax: u32,
    /// Compare computed Satake images with the reference rows.
    #[arg(long)]
    table1: bool,
    /// Also run the amplifier minimum scan at p.
    #[arg(long)]
    amplifier: bool,
    #[arg(long, default_value_t = 10)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = Budgets::default().candidates)]
    candidate_budget: u128,
    #[arg(long, default_value_t = Budgets::default().products)]
    product_budget: u128,
}

#[derive(Args)]
struct SphericalCmd {
    /// Largest Killing norm of lambda on the decay grid; 0 gives the degenerate grid.
    #[arg(long, default_value_t = 60.0)]
    lambda_max: f64,
    /// Restrict the decay grid to the wall directions.
    #[arg(long)]
    walls_only: bool,
    /// Use the small decay grid and fewer sanity samples.
    #[arg(long)]
    quick: bool,
    #[arg(long, default_value_t = 1000)]
    c_points: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Skip the test-function suite and the inverse transform.
    #[arg(long)]
    skip_test_function: bool,
}

#[derive(Args)]
struct CountCmd {
    /// Use g = identity (the default).
    #[arg(long, conflicts_with = "g_seed")]
    id: bool,
    /// Use a random base point n(x, S) exp(H) generated from this seed.
    #[arg(long)]
    g_seed: Option<u64>,
    /// Range of m, e.g. 1..30 (inclusive).
    #[arg(long = "m")]
    m_range: String,
    /// Keep only odd m.
    #[arg(long)]
    odd: bool,
    /// Comma-separated list of delta values.
    #[arg(long, value_delimiter = ',', default_value = "0.001")]
    delta: Vec<f64>,
    /// Cross-check against the naive oracle for m up to this value.
    #[arg(long, default_value_t = DEFAULT_ORACLE_MAX)]
    oracle_max: i64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
}

#[derive(Args)]
struct ExponentCmd {
    #[arg(long)]
    eta: f64,
    #[arg(long = "b", short = 'b')]
    big_b: f64,
}

struct Run {
    name: &'static str,
    parameters: serde_json::Value,
    seeds: Vec<u64>,
    budgets: serde_json::Value,
    cache_dir: Option<PathBuf>,
}

fn execute(cli: &Cli) -> (Run, Result<Outcome, CliError>) {
    match &cli.command {
        Command::Hecke(c) => {
            let cache = cli.cache_dir.clone().unwrap_or_else(default_cache_dir);
            let args = HeckeArgs {
                p: c.prime,
                rmax: c.rmax,
                table1: c.table1,
                amplifier: c.amplifier,
                samples: c.samples,
                seed: c.seed,
                candidate_budget: c.candidate_budget,
                product_budget: c.product_budget,
                cache_dir: cache.clone(),
            };
            let run = Run {
                name: "hecke",
                parameters: json!({"p": c.prime, "rmax": c.rmax, "table1": c.table1, "amplifier": c.amplifier, "samples": c.samples}),
                seeds: vec![c.seed],
                budgets: json!({"candidates": c.candidate_budget.to_string(), "products": c.product_budget.to_string()}),
                cache_dir: Some(cache),
            };
            (run, run_hecke(&args, &cli.out).map(|(_, o)| o))
        }
        Command::Spherical(c) => {
            let args = SphericalArgs {
                lambda_max: c.lambda_max,
                walls_only: c.walls_only,
                quick: c.quick,
                c_points: c.c_points,
                seed: c.seed,
                skip_test_function: c.skip_test_function,
                ..SphericalArgs::default()
            };
            let run = Run {
                name: "spherical",
                parameters: serde_json::to_value(&args).unwrap_or_default(),
                seeds: vec![c.seed],
                budgets: json!({}),
                cache_dir: None,
            };
            (run, run_spherical(&args, &cli.out).map(|(_, o)| o))
        }
        Command::Count(c) => {
            let run = Run {
                name: "count",
                parameters: json!({"g_seed": c.g_seed, "m": c.m_range, "odd": c.odd, "delta": c.delta, "oracle_max": c.oracle_max}),
                seeds: c.g_seed.into_iter().collect(),
                budgets: json!({"enumeration": c.budget.to_string()}),
                cache_dir: None,
            };
            let result = parse_m_range(&c.m_range).and_then(|mut m_values| {
                if c.odd {
                    m_values.retain(|m| m % 2 == 1);
                }
                let args = CountArgs { g_seed: c.g_seed, oracle_max: c.oracle_max, budget: c.budget, ..CountArgs::new(m_values, c.delta.clone()) };
                run_count(&args, &cli.out).map(|(_, o)| o)
            });
            (run, result)
        }
        Command::Exponent(c) => {
            let run = Run {
                name: "exponent",
                parameters: json!({"eta": c.eta, "B": c.big_b}),
                seeds: Vec::new(),
                budgets: json!({}),
                cache_dir: None,
            };
            let result = exponent_report(c.eta, c.big_b).map(|r| {
                for line in r.lines() {
                    println!("{line}");
                }
                let mut o = Outcome::default();
                o.check("exponent below 2", r.exponent < 2.0, format!("{:.15}", r.exponent));
                o
            });
            (run, result)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let start = Instant::now();
    let (run, result) = execute(&cli);
    let (code, checks, files, error) = match result {
        Ok(o) => {
            for c in &o.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            (o.exit_code(), o.checks, o.files, None)
        }
        Err(e) => {
            eprintln!("error: {e}");
            (e.exit_code(), Vec::new(), Vec::new(), Some(e.to_string()))
        }
    };
    let manifest = RunManifest {
        schema_version: SCHEMA_VERSION,
        subcommand: run.name.into(),
        parameters: run.parameters,
        seeds: run.seeds,
        budgets: run.budgets,
        output_dir: cli.out.clone(),
        cache_dir: run.cache_dir,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        passed: code == 0,
        exit_code: code,
        error,
        checks,
        files,
    };
    if let Err(e) = manifest.write() {
        eprintln!("error: cannot write manifest: {e}");
        return ExitCode::from(sp4_cli::EXIT_RESOURCE as u8);
    }
    ExitCode::from(code as u8)
}
