use std::path::Path;
use std::process::{Command, Output};

use sp4_cli::RunManifest;

fn sp4(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sp4")).arg("-o").arg(out).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn exponent_prints_selection_rules() {
    let dir = tempfile::tempdir().unwrap();
    let o = sp4(dir.path(), &["exponent", "--eta", "0.2", "--b", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("delta = |mu|^(-0.714285714285714)"), "{text}");
    assert!(text.contains("= 1.989285714285714"), "{text}");
    let m = RunManifest::read(dir.path()).unwrap();
    assert_eq!((m.subcommand.as_str(), m.schema_version, m.passed), ("exponent", 1, true));
}

#[test]
fn usage_errors_exit_with_4() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["exponent", "--eta", "0", "--b", "1"],
        vec!["exponent", "--eta", "1", "--b", "-2"],
        vec!["hecke", "-p", "9"],
        vec!["count", "--id", "--m", "5..1"],
        vec!["count", "--id", "--m", "1..3", "--delta", "0.5"],
        vec!["spherical", "--lambda-max", "-1"],
        vec!["no-such-command"],
    ] {
        let o = sp4(dir.path(), &args);
        assert_eq!(o.status.code(), Some(4), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let m = RunManifest::read(dir.path()).unwrap();
    assert_eq!(m.exit_code, 4);
    assert!(m.error.is_some());
}

#[test]
fn hecke_trivial_degree() {
    let dir = tempfile::tempdir().unwrap();
    let cache = tempfile::tempdir().unwrap();
    let o = sp4(dir.path(), &["--cache-dir", cache.path().to_str().unwrap(), "hecke", "-p", "2", "-r", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let m = RunManifest::read(dir.path()).unwrap();
    assert_eq!(m.cache_dir.as_deref(), Some(cache.path()));
    assert_eq!(m.checks.len(), 1);
}

#[test]
fn hecke_table1_is_reproducible_with_warm_cache() {
    let cache = tempfile::tempdir().unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["--cache-dir", cache.path().to_str().unwrap(), "hecke", "-p", "2", "-r", "4", "--table1"];
    let first = sp4(a.path(), &args);
    assert_eq!(first.status.code(), Some(0), "{}", stdout(&first));
    assert!(stdout(&first).contains("PASS p=2 Satake rows (corrected table)"));
    assert!(std::fs::read_dir(cache.path()).unwrap().count() > 0);
    let second = sp4(b.path(), &args);
    assert_eq!(second.status.code(), Some(0));
    let report = "hecke_p2_r4.json";
    assert_eq!(std::fs::read(a.path().join(report)).unwrap(), std::fs::read(b.path().join(report)).unwrap());
}

#[test]
fn count_identity_scan() {
    let dir = tempfile::tempdir().unwrap();
    let o = sp4(dir.path(), &["count", "--id", "--m", "1..30", "--delta", "1e-3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("PASS enumeration equals oracle"), "{text}");
    assert!(text.contains("PASS count >= 8 sigma(m)"), "{text}");
    let csv = std::fs::read_to_string(dir.path().join("counts.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("m,delta,count,lower_bound,budget_hit"));
    assert_eq!(csv.lines().count(), 31);
    assert!(csv.lines().nth(1).unwrap().starts_with("1,0.001,32,"));
}

#[test]
fn count_off_identity_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["count", "--g-seed", "5", "--m", "1..6", "--delta", "0.2,0.3"];
    let first = sp4(a.path(), &args);
    assert_eq!(first.status.code(), Some(0), "{}", stdout(&first));
    sp4(b.path(), &args);
    for f in ["counts.csv", "count.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn spherical_degenerate_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = sp4(dir.path(), &["spherical", "--lambda-max", "0", "--quick", "--skip-test-function", "--c-points", "200"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS decay scan: |phi_0| <= 1"));
    let csv = std::fs::read_to_string(dir.path().join("decay.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!((cols[0], cols[1]), ("0.0", "0.0"));
        assert!(cols[5].parse::<f64>().unwrap() <= 1.0 + 1e-6);
    }
}

#[test]
fn spherical_walls_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = sp4(dir.path(), &["spherical", "--walls-only", "--quick", "--skip-test-function", "--c-points", "200"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let csv = std::fs::read_to_string(dir.path().join("decay.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').take(2).map(|c| c.parse().unwrap()).collect();
        assert!(cols[1] == 0.0 || (cols[0] - cols[1]).abs() < 1e-12, "{line}");
    }
    let m = RunManifest::read(dir.path()).unwrap();
    assert_eq!(m.files.len(), 3);
}
