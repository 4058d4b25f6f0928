//! Identity suite, Satake table comparison and homomorphism samples at one prime.

use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sp4_hecke::amplifier::{self, amplifier_scan};
use sp4_hecke::cache::CosetCache;
use sp4_hecke::identities::{verify_identity_suite, IdentityReport};
use sp4_hecke::label::is_prime;
use sp4_hecke::multiply::{Budgets, HeckeAlgebra};
use sp4_hecke::satake::{errata, reference_row, reference_rows, satake, satake_label, weyl_orbit, SatakePolynomial, TableVariant};
use sp4_hecke::{DoubleCosetLabel, HeckeElement};

use crate::error::{CliError, Result};
use crate::manifest::{write_json, Outcome, SCHEMA_VERSION};

/// Largest degree of a reference row at `p = 2`.
pub const TABLE1_MAX_R: u32 = 6;
/// Largest degree of a reference row compared at odd primes.
pub const TABLE1_MAX_R_ODD: u32 = 4;
pub const AMPLIFIER_STEP: f64 = 0.01;
/// Constant of the `T(p⁴)²` bound, used for every computed square.
pub const SQUARE_CONSTANT: f64 = 400.0;

#[derive(Debug, Clone, Serialize)]
pub struct HeckeArgs {
    pub p: u64,
    pub rmax: u32,
    pub table1: bool,
    pub amplifier: bool,
    pub samples: usize,
    pub seed: u64,
    pub candidate_budget: u128,
    pub product_budget: u128,
    pub cache_dir: PathBuf,
}

impl HeckeArgs {
    pub fn new(p: u64, rmax: u32, cache_dir: PathBuf) -> Self {
        let b = Budgets::default();
        Self {
            p,
            rmax,
            table1: false,
            amplifier: false,
            samples: 10,
            seed: 1,
            candidate_budget: b.candidates,
            product_budget: b.products,
            cache_dir,
        }
    }

    pub fn budgets(&self) -> Budgets {
        Budgets { candidates: self.candidate_budget, products: self.product_budget }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1Row {
    pub p: u64,
    pub r: u32,
    pub b: u32,
    pub computed: String,
    pub matches_printed: bool,
    pub matches_corrected: bool,
    /// `(monomial, computed, printed)` for every differing coefficient.
    pub printed_differences: Vec<(String, String, String)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1Report {
    pub rows: Vec<Table1Row>,
    pub printed_mismatches: usize,
    /// Number of listed errata whose row was compared.
    pub errata_in_range: usize,
}

impl Table1Report {
    pub fn corrected_passed(&self) -> bool {
        self.rows.iter().all(|r| r.matches_corrected)
    }

    pub fn printed_passed(&self) -> bool {
        self.rows.iter().all(|r| r.matches_printed)
    }

    /// Every printed mismatch is one of the listed errata.
    pub fn mismatches_are_errata(&self) -> bool {
        self.printed_mismatches == self.errata_in_range
            && self.rows.iter().all(|row| {
                row.printed_differences.iter().all(|(mono, _, _)| {
                    errata().iter().any(|e| e.r == row.r && e.b == row.b && mono == &format_monomial(row.r, e.orbit))
                })
            })
    }
}

/// Representative `(a₁, a₂)` with `a₁ ≤ a₂ ≤ r/2` of the orbit containing `e`.
fn orbit_of(r: u32, e: (i32, i32)) -> (u32, u32) {
    (0..=r / 2)
        .flat_map(|a2| (0..=a2).map(move |a1| (a1, a2)))
        .find(|&(a1, a2)| weyl_orbit(r, a1, a2).contains(&e))
        .unwrap_or((e.0.unsigned_abs(), e.1.unsigned_abs()))
}

fn format_monomial(r: u32, orbit: (u32, u32)) -> String {
    format!("x0^{r} x1^{} x2^{}", orbit.0, orbit.1)
}

#[derive(Debug, Clone, Serialize)]
pub struct HomomorphismSample {
    pub r1: u32,
    pub r2: u32,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HeckeReport {
    pub schema_version: u32,
    pub p: u64,
    pub rmax: u32,
    pub seed: u64,
    pub identities: IdentityReport,
    pub table1: Option<Table1Report>,
    pub homomorphism: Vec<HomomorphismSample>,
    pub amplifier: Option<amplifier::ScanReport>,
}

fn random_element(rng: &mut ChaCha8Rng, p: u64, r: u32) -> HeckeElement {
    let mut e = HeckeElement::zero(p);
    for l in DoubleCosetLabel::all(p, r) {
        let c: i64 = rng.gen_range(-3..=3);
        e.add_term(l, BigRational::from_integer(BigInt::from(c)));
    }
    e
}

/// `S(t₁t₂) = S(t₁)S(t₂)` for random elements of degrees `r₁ + r₂ ≤ rmax`.
pub fn homomorphism_samples(alg: &mut HeckeAlgebra, rmax: u32, samples: usize, seed: u64) -> Result<Vec<HomomorphismSample>> {
    if rmax < 2 {
        return Ok(Vec::new());
    }
    let p = alg.p();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let r1 = rng.gen_range(1..rmax);
        let r2 = rng.gen_range(1..=rmax - r1);
        let t1 = random_element(&mut rng, p, r1);
        let t2 = random_element(&mut rng, p, r2);
        let prod = alg.hecke_multiply(&t1, &t2)?;
        let lhs = satake(alg, &prod)?;
        let rhs = satake(alg, &t1)?.mul(&satake(alg, &t2)?);
        out.push(HomomorphismSample { r1, r2, passed: lhs == rhs });
    }
    Ok(out)
}

/// Computed Satake images of the primitive rows `T^{(r)}_{0,b}` against both versions of the table.
pub fn table1_comparison(alg: &mut HeckeAlgebra, rmax: u32) -> Result<Table1Report> {
    let p = alg.p();
    let limit = if p == 2 { TABLE1_MAX_R } else { TABLE1_MAX_R_ODD }.min(rmax);
    let mut rows = Vec::new();
    for (r, b) in reference_rows().into_iter().filter(|&(r, _)| r <= limit) {
        let computed = satake_label(alg, &DoubleCosetLabel::new(p, r, 0, b)?)?;
        let printed = reference_row(p, r, b, TableVariant::Printed).expect("listed row");
        let corrected = reference_row(p, r, b, TableVariant::Corrected).expect("listed row");
        rows.push(table1_row(p, r, b, &computed, &printed, &corrected));
    }
    let printed_mismatches = rows.iter().map(|r| r.printed_differences.len()).sum();
    let errata_in_range = errata().iter().filter(|e| rows.iter().any(|r| r.r == e.r && r.b == e.b)).count();
    Ok(Table1Report { rows, printed_mismatches, errata_in_range })
}

fn table1_row(p: u64, r: u32, b: u32, computed: &SatakePolynomial, printed: &SatakePolynomial, corrected: &SatakePolynomial) -> Table1Row {
    // the table lists one coefficient per Weyl orbit
    let mut printed_differences: Vec<(String, String, String)> = Vec::new();
    for ((deg, e1, e2), c, pr) in computed.differences(printed) {
        let mono = format_monomial(deg, orbit_of(deg, (e1, e2)));
        if !printed_differences.iter().any(|d| d.0 == mono) {
            printed_differences.push((mono, c.to_string(), pr.to_string()));
        }
    }
    Table1Row {
        p,
        r,
        b,
        computed: computed.to_string(),
        matches_printed: computed == printed,
        matches_corrected: computed == corrected,
        printed_differences,
    }
}

pub fn run_hecke(args: &HeckeArgs, out_dir: &Path) -> Result<(HeckeReport, Outcome)> {
    if !is_prime(args.p) {
        return Err(CliError::Usage(format!("{} is not a prime", args.p)));
    }
    std::fs::create_dir_all(out_dir)?;
    let mut alg = HeckeAlgebra::new(args.p, args.budgets())?.with_cache(CosetCache::new(&args.cache_dir));
    let mut outcome = Outcome::default();

    let identities = verify_identity_suite(&mut alg, args.rmax)?;
    for c in &identities.checks {
        outcome.check(format!("p={} {}", args.p, c.name), c.passed, format!("{} mismatching coefficients", c.mismatches.len()));
    }
    if !identities.square_coefficients.is_empty() {
        outcome.check(
            format!("p={} |c_(r,b,s)| <= {SQUARE_CONSTANT} p^(3r-2s)", args.p),
            identities.square_constant <= SQUARE_CONSTANT,
            format!("max |c_(r,b,s)|/p^(3r-2s) = {}", identities.square_constant),
        );
    }

    let table1 = if args.table1 {
        let t = table1_comparison(&mut alg, args.rmax)?;
        outcome.check(
            format!("p={} Satake rows (corrected table)", args.p),
            t.corrected_passed(),
            format!("{} rows compared", t.rows.len()),
        );
        outcome.check(
            format!("p={} printed-table differences are the listed errata", args.p),
            t.mismatches_are_errata(),
            format!("{} coefficients differ from the printed table", t.printed_mismatches),
        );
        Some(t)
    } else {
        None
    };

    let homomorphism = homomorphism_samples(&mut alg, args.rmax, args.samples, args.seed)?;
    if !homomorphism.is_empty() {
        let ok = homomorphism.iter().filter(|s| s.passed).count();
        outcome.check(
            format!("p={} Satake homomorphism", args.p),
            ok == homomorphism.len(),
            format!("{ok}/{} random pairs", homomorphism.len()),
        );
    }

    let amplifier = if args.amplifier {
        let scan = amplifier_scan(&[args.p], AMPLIFIER_STEP)?;
        for ps in &scan.primes {
            outcome.check(
                format!("p={} amplifier minimum", ps.p),
                ps.passed(),
                format!("minimum {:.6}, refined {:.6}", ps.minimum, ps.refined_minimum),
            );
        }
        Some(scan)
    } else {
        None
    };

    let report = HeckeReport {
        schema_version: SCHEMA_VERSION,
        p: args.p,
        rmax: args.rmax,
        seed: args.seed,
        identities,
        table1,
        homomorphism,
        amplifier,
    };
    let path = out_dir.join(format!("hecke_p{}_r{}.json", args.p, args.rmax));
    write_json(&path, &report)?;
    outcome.files.push(path);
    Ok((report, outcome))
}
