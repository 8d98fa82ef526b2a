use oscspec::cli_reporting::tables;
use std::process::{Command, Output};

fn oscspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oscspec")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn constant_shift_table() {
    let o = oscspec(&["eigs", "--potential", "const:0.5", "--n", "0:10"]);
    assert!(o.status.success());
    let rows = tables::read_eigen_csv(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 11);
    for r in rows {
        assert!((r.mu - (2.0 * r.n as f64 + 1.5)).abs() < 1e-8);
    }
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["asym", "--potential", "cos:1:1", "--n", "0:40", "--mu1-variant", "bessel"];
    let (a, b) = (oscspec(&args), oscspec(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(tables::read_asymptotic_csv(&stdout(&a)).unwrap().len(), 41);
}

#[test]
fn unperturbed_wronskian_changes_sign_at_odd_integers() {
    let o = oscspec(&["wronskian", "--potential", "const:0", "--lmin", "0", "--lmax", "12", "--variant", "asym"]);
    assert!(o.status.success());
    let s = tables::read_wronskian_csv(&stdout(&o)).unwrap();
    assert_eq!(s.len(), 121);
    for w in s.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.value != 0.0 && b.value != 0.0 {
            assert_eq!(a.value > 0.0, b.value > 0.0, "sign change between {} and {}", a.lambda, b.lambda);
        }
    }
    for p in &s {
        let odd = (p.lambda - 1.0).rem_euclid(2.0) == 0.0;
        assert_eq!(p.value == 0.0, odd, "lambda {}", p.lambda);
    }
}

#[test]
fn compare_writes_report_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = oscspec(&["compare", "--potential", "cos:1.0:1.0", "--n", "20:200", "--tol", "1e-6", "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["schema"], "oscspec/1");
    assert_eq!(report["pass"], true);
    assert!(report["fitted_slope"].as_f64().unwrap() <= -0.25);
    assert_eq!(report["provenance"]["config"]["potential"], "cos:1.0:1.0");
    let rows = tables::read_comparison_csv(&std::fs::read_to_string(out.with_extension("csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 181);
    for r in rows {
        assert_eq!(r.residual, r.mu_ref - r.mu0 - r.mu1);
    }
}

#[test]
fn failed_comparison_exits_with_one() {
    // over this short window the oscillating residual does not yet show its decay
    let o = oscspec(&["compare", "--potential", "cos:1:1", "--n", "20:80"]);
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["pass"], false);
}

#[test]
fn compare_reads_an_emitted_eigen_table() {
    let dir = tempfile::tempdir().unwrap();
    let eig = dir.path().join("eigs.csv");
    assert!(oscspec(&["eigs", "--potential", "cos:1:1", "--n", "0:30", "-o", eig.to_str().unwrap()]).status.success());
    let o = oscspec(&["compare", "--potential", "cos:1:1", "--n", "10:30", "--reference", eig.to_str().unwrap()]);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 21);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"command": "eigs", "potential": "const:0.25", "n_range": "0:3", "format": "json"}"#).unwrap();
    let o = oscspec(&["--config", cfg.to_str().unwrap(), "--potential", "const:1"]);
    assert!(o.status.success());
    let t: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let mu = t["entries"][3]["mu"].as_f64().unwrap();
    assert!((mu - 8.0).abs() < 1e-8);
}

fn error_kind(o: &Output) -> String {
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).expect("error JSON on stderr");
    assert_eq!(v["schema"], "oscspec/1");
    v["error"]["kind"].as_str().unwrap().to_string()
}

#[test]
fn failures_exit_nonzero_with_error_json() {
    let o = oscspec(&["eigs", "--potential", "wave:1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_kind(&o), "potential");

    let o = oscspec(&["eigs", "--potential", "const:0", "--tol", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_kind(&o), "config");

    let o = oscspec(&["eigs", "--potential", "const:0", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_kind(&o), "config");

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"command": "eigs", "potential": "const:0", "colour": "red"}"#).unwrap();
    let o = oscspec(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(error_kind(&o), "config");

    let o = oscspec(&["wronskian", "--potential", "const:0", "--variant", "ode", "--lmin", "4", "--lmax", "4", "--lsteps", "1", "--x-max", "3"]);
    assert_eq!(error_kind(&o), "wronskian");
}

#[test]
fn contour_table_marks_the_split_point() {
    let o = oscspec(&["contour", "--lambda-re", "30", "--lambda-im", "10", "--contour-points", "256"]);
    assert!(o.status.success());
    let rows = tables::read_contour_csv(&stdout(&o)).unwrap();
    assert_eq!(rows.iter().filter(|r| r.side == "star").count(), 1);
    assert_eq!(rows[0].side, "minus");
    assert_eq!(rows.last().unwrap().side, "plus");
}
