//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Criterion ids given as arguments
//! restrict the run, e.g. `cargo test --test acceptance -- 3 11`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sp4_cli::count::oracle_cross_check;
use sp4_cli::exponent::displayed_exponent;
use sp4_cli::hecke::{homomorphism_samples, table1_comparison, SQUARE_CONSTANT};
use sp4_cli::spherical::{c_function_comparison, sanity_checks, SanityConfig};
use sp4_counting::dirichlet::dirichlet_approx;
use sp4_counting::enumerate::sigma;
use sp4_counting::quadratic::DEFAULT_MIN_DISCRIMINANT;
use sp4_counting::{count_near_zero, enumerate_s, prop1_scan, CountingContext, EnumerationConfig, QuadPoly2, ScanConfig};
use sp4_hecke::amplifier::amplifier_scan;
use sp4_hecke::cache::CosetCache;
use sp4_hecke::cosets::{coset_count, isotropic_plane_count, left_cosets, DEFAULT_CANDIDATE_BUDGET};
use sp4_hecke::identities::verify_identity_suite;
use sp4_hecke::multiply::{Budgets, HeckeAlgebra};
use sp4_hecke::{DoubleCosetLabel, HeckeElement};
use sp4_spherical::decay::{decay_scan, DecayGrid};
use sp4_spherical::inverse::{default_points, inverse_transform_sample, InverseConfig};
use sp4_spherical::phase::{phase_probe, random_probes};
use sp4_spherical::testfn::{check_test_function, TestFunctionSpec};
use sp4_spherical::SpectralParameter;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

fn algebra(p: u64, cache: &tempfile::TempDir) -> HeckeAlgebra {
    HeckeAlgebra::new(p, Budgets::default()).unwrap().with_cache(CosetCache::new(cache.path()))
}

/// Isotropic 2-planes of `F_p⁴` for `J = (0 I; −I 0)`, counted from ordered bases.
fn lagrangian_planes_brute_force(p: i64) -> u128 {
    let vecs: Vec<[i64; 4]> = (0..p.pow(4)).map(|n| std::array::from_fn(|i| (n / p.pow(i as u32)) % p)).collect();
    let form = |u: &[i64; 4], v: &[i64; 4]| (u[0] * v[2] + u[1] * v[3] - u[2] * v[0] - u[3] * v[1]).rem_euclid(p);
    let independent = |u: &[i64; 4], v: &[i64; 4]| {
        (0..4).any(|i| (i + 1..4).any(|j| (u[i] * v[j] - u[j] * v[i]).rem_euclid(p) != 0))
    };
    let mut bases = 0u128;
    for u in vecs.iter().filter(|u| u.iter().any(|&x| x != 0)) {
        bases += vecs.iter().filter(|v| form(u, v) == 0 && independent(u, v)).count() as u128;
    }
    let p = p as u128;
    bases / ((p * p - 1) * (p * p - p))
}

fn c1_coset_degrees() -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for p in [2u64, 3, 5, 7] {
        let table = left_cosets(p, 1, DEFAULT_CANDIDATE_BUDGET).unwrap();
        let expected = (p * p * p + p * p + p + 1) as u128;
        let oracle = lagrangian_planes_brute_force(p as i64);
        let n = table.len() as u128;
        ok &= n == expected && oracle == expected && isotropic_plane_count(p) == expected && coset_count(p as i64) == expected;
        ok &= table.validate().is_ok();
        parts.push(format!("p={p}: {n} (oracle {oracle})"));
    }
    verdict(ok, parts.join(", "))
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn c2_square() -> Verdict {
    let cache = tempfile::tempdir().unwrap();
    let mut parts = Vec::new();
    let mut ok = true;
    for p in [2u64, 3, 5] {
        let mut alg = algebra(p, &cache);
        let t = HeckeElement::t_p_power(p, 1);
        let sq = alg.hecke_multiply(&t, &t).unwrap();
        let pi = p as i64;
        let want = HeckeElement::from_terms(
            p,
            [
                (DoubleCosetLabel::new(p, 2, 0, 0).unwrap(), int(1)),
                (DoubleCosetLabel::new(p, 2, 0, 1).unwrap(), int(pi + 1)),
                (DoubleCosetLabel::new(p, 2, 1, 1).unwrap(), int(pi.pow(3) + pi * pi + pi + 1)),
            ],
        )
        .unwrap();
        ok &= sq == want;
        parts.push(format!("p={p}: {sq}"));
    }
    verdict(ok, parts.join("; "))
}

fn c3_table1() -> Verdict {
    let cache = tempfile::tempdir().unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, rmax) in [(2u64, 6u32), (3, 4)] {
        let mut alg = algebra(p, &cache);
        let t = table1_comparison(&mut alg, rmax).unwrap();
        ok &= t.corrected_passed() && t.mismatches_are_errata();
        let wrong: Vec<String> = t
            .rows
            .iter()
            .filter(|r| !r.matches_printed)
            .flat_map(|r| r.printed_differences.iter().map(move |d| format!("T({})_0,{} at {}", r.r, r.b, d.0)))
            .collect();
        parts.push(format!(
            "p={p}: {} rows equal the corrected table; printed table {} ({} entries: {})",
            t.rows.len(),
            if t.printed_passed() { "PASS" } else { "FAIL" },
            t.printed_mismatches,
            wrong.join(", ")
        ));
    }
    verdict(ok, parts.join("; "))
}

fn c4_identities() -> Verdict {
    let cache = tempfile::tempdir().unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, rmax) in [(2u64, 6u32), (3, 4)] {
        let mut alg = algebra(p, &cache);
        let r = verify_identity_suite(&mut alg, rmax).unwrap();
        let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        let has = |s: &str| r.checks.iter().any(|c| c.name.contains(s));
        let covered = has("T(p^2)^2 decomposition") && has("T(p^4) relation") && has("400-bound") && has("chain r=1");
        let kodamanew_r2 = p != 2 || has("chain r=2");
        let rs: std::collections::BTreeSet<u32> = r.square_coefficients.iter().map(|c| c.r).collect();
        let squares = p != 2 || [1, 2, 4].iter().all(|x| rs.contains(x));
        ok &= r.passed() && covered && kodamanew_r2 && squares && r.square_constant <= SQUARE_CONSTANT;
        parts.push(format!("p={p}: {} checks, failed {failed:?}, max |c|/p^(3r-2s) = {:.4}", r.checks.len(), r.square_constant));
    }
    verdict(ok, parts.join("; "))
}

fn c5_homomorphism() -> Verdict {
    let cache = tempfile::tempdir().unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, rsum) in [(2u64, 5u32), (3, 4)] {
        let mut alg = algebra(p, &cache);
        let s = homomorphism_samples(&mut alg, rsum, 10, 100 + p).unwrap();
        let good = s.iter().filter(|x| x.passed).count();
        ok &= s.len() == 10 && good == 10;
        parts.push(format!("p={p}: {good}/{}", s.len()));
    }
    verdict(ok, parts.join(", "))
}

fn c6_amplifier() -> Verdict {
    let r = amplifier_scan(&[2, 3, 5, 7, 11], 0.01).unwrap();
    let parts: Vec<String> = r
        .primes
        .iter()
        .map(|s| format!("p={}: {:.6} (refined {:.6})", s.p, s.minimum, s.refined_minimum))
        .collect();
    verdict(r.passed(), parts.join(", "))
}

fn c7_spherical_sanity() -> Verdict {
    let r = sanity_checks(&SanityConfig::default()).unwrap();
    verdict(
        r.identity_ok() && r.symmetry_ok() && r.bound_ok(),
        format!(
            "|phi(e)-1| {:.1e}, |phi_irho-1| {:.1e}, Weyl {:.1e}, -lambda {:.1e}, max |phi| {:.9}",
            r.max_identity_error, r.max_i_rho_error, r.max_weyl_deviation, r.max_negation_deviation, r.max_abs_phi
        ),
    )
}

fn c8_c_function() -> Verdict {
    let r = c_function_comparison(1000, 60.0, 8, None).unwrap();
    verdict(
        r.passed() && r.points == 1000,
        format!("max relative difference {:.2e} on {} points, wall maximum {}", r.max_relative_difference, r.points, r.max_wall_value),
    )
}

fn c9_decay() -> Verdict {
    let grid = DecayGrid::default();
    let walls = grid.lambda_dirs.iter().any(|d| d.1 == 0.0) && grid.lambda_dirs.iter().any(|d| d.0 == d.1);
    let r = decay_scan(&grid).unwrap();
    verdict(
        r.passed() && walls,
        format!(
            "C_emp {:.4}, max s {:.4} (ratio {:.3}), far slope {:.3} on {} rows, level stability {:.1e}, {} rows",
            r.c_emp,
            r.max_statistic,
            r.max_statistic / r.c_emp,
            r.far_slope,
            r.far_points,
            r.level_stability,
            r.rows.len()
        ),
    )
}

fn c10_phase() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let probes = random_probes(&mut rng, 10).unwrap();
    let exps: Vec<f64> = probes.iter().map(|p| phase_probe(p).unwrap().fitted_exponent).collect();
    let ok = exps.iter().all(|e| (1.8..=2.2).contains(e));
    verdict(ok, format!("fitted exponents {:?}", exps.iter().map(|e| format!("{e:.3}")).collect::<Vec<_>>()))
}

fn c11_oracle() -> Verdict {
    let ctx = CountingContext::identity();
    let rows = oracle_cross_check(&ctx, &(1..=8).collect::<Vec<_>>(), &[0.05, 0.2], 8, EnumerationConfig::default().budget).unwrap();
    let equal = rows.iter().all(|r| r.equal) && rows.len() == 16;
    let m1 = enumerate_s(&ctx, 0.05, 1, &EnumerationConfig::default()).unwrap().matrices.len();
    let counts: Vec<String> = rows.iter().filter(|r| r.delta == 0.05).map(|r| format!("{}:{}", r.m, r.enumerated)).collect();
    verdict(equal && m1 == 32, format!("16 (m, delta) sets equal: {equal}; m=1 count {m1}; counts at 0.05 {}", counts.join(" ")))
}

fn c12_lower_bound() -> Verdict {
    let ctx = CountingContext::identity();
    let odd = |n: i64| (1..=n).filter(|m| m % 2 == 1).collect::<Vec<_>>();
    let deltas = vec![1e-3, 1e-2, 0.1, 0.3];
    let lower = prop1_scan(&ctx, &ScanConfig::new(odd(30), deltas.clone()).unwrap()).unwrap();
    let slope_scan = prop1_scan(&ctx, &ScanConfig::new(odd(50), vec![1e-3]).unwrap()).unwrap();
    let rows_ok = lower.rows.iter().all(|r| !r.budget_hit && (r.count >= 8 * sigma(r.m as u64)));
    let ok = rows_ok && lower.lower_bound_failures.is_empty() && !slope_scan.budget_hit() && slope_scan.slope <= 1.4;
    verdict(
        ok,
        format!(
            "{} rows with count >= 8 sigma(m) at deltas {deltas:?}: {rows_ok}; slope {:.4} on odd m <= 50 at delta 1e-3",
            lower.rows.len(),
            slope_scan.slope
        ),
    )
}

/// Brute-force count of `|P| < δ` on a box containing the sublevel set.
fn brute_force_near_zero(p: &QuadPoly2, delta: f64) -> u64 {
    let [a, b, c, d, e, f] = p.coefficients();
    let lmin = 0.5 * (a + c - ((a - c).powi(2) + b * b).sqrt());
    let lin = d.hypot(e);
    let r = ((lin + (lin * lin + 4.0 * lmin * (f.abs() + delta)).sqrt()) / (2.0 * lmin)).ceil() as i64 + 1;
    let mut n = 0;
    for x in -r..=r {
        for y in -r..=r {
            if p.eval(x as f64, y as f64).abs() < delta {
                n += 1;
            }
        }
    }
    n
}

fn c13_diophantine() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut dirichlet_ok = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=4);
        let xi: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let t: f64 = rng.gen_range(1.01..=100.0);
        let a = dirichlet_approx(&xi, t).unwrap();
        let tol = t.powf(-1.0 / n as f64);
        let admissible = |q: u64| xi.iter().all(|x| ((q as f64) * x - ((q as f64) * x).round()).abs() <= tol * (1.0 + 1e-12));
        let minimal = (1..a.q).all(|q| !admissible(q));
        if a.satisfies(&xi, t) && minimal && a.q as f64 <= t {
            dirichlet_ok += 1;
        }
    }
    let mut bound_ok = 0;
    let mut exact_ok = 0;
    let mut done = 0;
    while done < 100 {
        let (a, c): (f64, f64) = (rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0));
        let b = rng.gen_range(-1.9..1.9) * (a * c).sqrt();
        let p = QuadPoly2::new(a, b, c, rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        if p.discriminant() > -DEFAULT_MIN_DISCRIMINANT {
            continue;
        }
        let delta = rng.gen_range(0.01..0.5);
        let r = count_near_zero(&p, delta, DEFAULT_MIN_DISCRIMINANT).unwrap();
        bound_ok += (r.count <= r.pipeline_bound) as usize;
        exact_ok += (r.count == brute_force_near_zero(&p, delta)) as usize;
        done += 1;
    }
    verdict(
        dirichlet_ok == 1000 && bound_ok == 100 && exact_ok == 100,
        format!("Dirichlet postcondition {dirichlet_ok}/1000; count <= pipeline bound {bound_ok}/100; exact count {exact_ok}/100"),
    )
}

fn c14_test_function() -> Verdict {
    let spec = TestFunctionSpec::with_default_order(SpectralParameter::real(12.0, 5.0)).unwrap();
    let c = check_test_function(&spec).unwrap();
    let inv = inverse_transform_sample(&spec, &default_points(), &InverseConfig::default()).unwrap();
    verdict(
        c.passed() && inv.reality_ok() && inv.support_decay_ok(),
        format!(
            "positivity min {:.2e}, big min real/conjugate/imaginary {:.3}/{:.3}/{:.3}, decay order {:.2} (need {:.1}), inverse reality {:.1e}, decay ratio {:.1e}",
            c.positivity_min,
            c.big_min_real,
            c.big_min_conjugate,
            c.big_min_imaginary,
            c.decay_order,
            c.required_decay_order,
            inv.max_reality_residue,
            inv.max_decay_ratio
        ),
    )
}

fn exponent_calculator() -> Verdict {
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut cases = vec![(0.2, 10.0)];
    cases.extend((0..5).map(|_| (rng.gen_range(0.01..3.0), rng.gen_range(0.1..50.0))));
    for (eta, b) in cases {
        let out = Command::new(env!("CARGO_BIN_EXE_sp4"))
            .args(["-o", tempfile::tempdir().unwrap().path().to_str().unwrap(), "exponent", "--eta", &eta.to_string(), "--b", &b.to_string()])
            .output()
            .unwrap();
        let text = String::from_utf8(out.stdout).unwrap();
        let printed: f64 = text
            .lines()
            .find(|l| l.starts_with("exponent 2 - 3 eta/(4B(1 + 2 eta)) = "))
            .and_then(|l| l.rsplit(' ').next())
            .and_then(|v| v.parse().ok())
            .unwrap_or(f64::NAN);
        let formula = 2.0 - 3.0 * eta / (4.0 * b * (1.0 + 2.0 * eta));
        worst = worst.max((printed - formula).abs()).max((displayed_exponent(eta, b) - formula).abs());
        if !out.status.success() {
            worst = f64::INFINITY;
        }
    }
    verdict(worst <= 1e-12, format!("max |printed - formula| = {worst:.1e} over 6 (eta, B), eta=0.2 B=10 gives {:.5}", displayed_exponent(0.2, 10.0)))
}

fn main() {
    let criteria: Vec<(&str, &str, fn() -> Verdict)> = vec![
        ("1", "coset degrees", c1_coset_degrees),
        ("2", "T(p)^2 decomposition", c2_square),
        ("3", "Satake table rows", c3_table1),
        ("4", "Hecke identities and square bounds", c4_identities),
        ("5", "Satake homomorphism", c5_homomorphism),
        ("6", "amplifier minimum", c6_amplifier),
        ("7", "spherical function sanity", c7_spherical_sanity),
        ("8", "c-function", c8_c_function),
        ("9", "spherical decay scan", c9_decay),
        ("10", "phase linearization", c10_phase),
        ("11", "counting oracle equivalence", c11_oracle),
        ("12", "lower-bound family and scan slope", c12_lower_bound),
        ("13", "Dirichlet and near-zero counts", c13_diophantine),
        ("14", "test function suite", c14_test_function),
        ("exp", "exponent calculator", exponent_calculator),
    ];
    let selected: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = Vec::new();
    for (id, title, run) in criteria {
        if !selected.is_empty() && !selected.iter().any(|s| s == id) {
            continue;
        }
        let start = Instant::now();
        let v = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            verdict(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        println!(
            "criterion {id:>3} {} {title} [{:.1}s]: {}",
            if v.passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            v.detail
        );
        if !v.passed {
            failures.push(id);
        }
    }
    if failures.is_empty() {
        println!("acceptance: all selected criteria passed");
    } else {
        println!("acceptance: failed criteria {failures:?}");
        std::process::exit(1);
    }
}
