use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toeplitz-spectra")).args(args).output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap_or_default().to_string()
}

#[test]
fn version_carries_git_hash() {
    let out = run(&["--version"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("toeplitz-spectra 0.1.0 ("), "{text}");
}

#[test]
fn spectrum_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let matrix = dir.path().join("t.csv");
    let args = ["spectrum", "--preset", "loop1", "--N", "24", "--dense-check"];
    let a = run(&args);
    let b = run(&[&args[..], &["--csv", csv.to_str().unwrap(), "--dump-matrix", matrix.to_str().unwrap()]].concat());
    assert_eq!(a.status.code(), Some(0));
    let (ra, mut rb) = (report(&a), report(&b));
    // The config echoes the output paths; everything else must be identical.
    rb["config"] = ra["config"].clone();
    assert_eq!(ra, rb);
    assert_eq!(run(&args).stdout, a.stdout);
    assert_eq!(ra["config"]["N"], 24);
    assert!(ra["version"].as_str().unwrap().contains('('));
    assert!(ra["invariants"].as_array().unwrap().iter().all(|i| i["pass"] == true));
    assert_eq!(header(&csv), "k,lambda,residual");
    assert_eq!(std::fs::read_to_string(&matrix).unwrap().lines().count(), 25);
    // Timings never reach the report.
    assert!(!String::from_utf8_lossy(&a.stdout).contains("solve_s"));
    assert!(String::from_utf8_lossy(&a.stderr).contains("solve_s"));
}

#[test]
fn config_files_are_strict() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    let report_path = dir.path().join("report.json");
    std::fs::write(
        &good,
        format!(
            r#"{{"command":"predictor","symbol":{{"preset":"ar1"}},"N":16,"output":{{"json":{:?}}}}}"#,
            report_path.to_str().unwrap()
        ),
    )
    .unwrap();
    let out = run(&["run", "--config", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert!(r["result"]["spectral_match_dev"].as_f64().unwrap() < 1e-12);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"command":"predictor","symbol":{"preset":"ar1"},"N":16,"verbose":true}"#).unwrap();
    assert_eq!(run(&["run", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&bad, r#"{"command":"predictor","symbol":{"preset":"ar1"},"N":16,"tolerances":{"spectral":0}}"#).unwrap();
    assert_eq!(run(&["run", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn invalid_symbol_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let sym = dir.path().join("odd.json");
    std::fs::write(&sym, r#"{"kind":"fourier","coeffs":[[0,2.0],[1,-1.0],[-1,-0.5]]}"#).unwrap();
    let out = run(&["spectrum", "--symbol", sym.to_str().unwrap(), "--N", "8"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["error"]["kind"], "invalid_argument");
    let missing = run(&["spectrum", "--symbol", "/nonexistent/sym.json", "--N", "8"]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--preset", "nope", "--N", "8"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--preset", "tridiag"]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let sym = dir.path().join("indefinite.json");
    // 1 + 2cos θ + 2cos 2θ dips below zero, so Levinson breaks down.
    std::fs::write(&sym, r#"{"kind":"fourier","coeffs":[[0,1.0],[1,1.0],[2,1.0]]}"#).unwrap();
    let out = run(&["predictor", "--symbol", sym.to_str().unwrap(), "--M", "8"]);
    assert_eq!(out.status.code(), Some(3));
    let r = report(&out);
    assert_eq!(r["error"]["kind"], "not_positive_definite");
    assert!(r["error"]["diagnostic"]["order"].as_u64().is_some());
}

#[test]
fn fraclap_tables() {
    let dir = tempfile::tempdir().unwrap();
    let modes = dir.path().join("modes.csv");
    let out = run(&["fraclap", "--alpha", "0.75", "--N", "128", "--kmin", "3", "--kmax", "6", "--modes", modes.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(header(&modes), "k,mu_k,approx,bound,matched_lambda,gap,overlap");
    assert_eq!(std::fs::read_to_string(&modes).unwrap().lines().count(), 5);
    let r = report(&out);
    assert!(!r["result"]["warnings"].as_array().unwrap().is_empty());

    let grid = dir.path().join("apply.csv");
    let out = run(&["fraclap-apply", "--alpha", "0.75", "--N", "128", "--bump", "--csv", grid.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(header(&grid), "x,discrete,oracle,abs_err");
    assert_eq!(run(&["fraclap", "--alpha", "0.5", "--N", "64"]).status.code(), Some(2));
}

#[test]
fn phase_invert_and_bench() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("phase.csv");
    let out = run(&["phase", "--preset", "loop1", "--N", "32", "--grid", "16", "--csv", curve.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(header(&curve), "lambda_prime,theta0,rho_N,rho_limit");
    assert_eq!(std::fs::read_to_string(&curve).unwrap().lines().count(), 17);

    let out = run(&["invert", "--preset", "tridiag", "--N", "30", "--lambda-prime", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(report(&out)["result"]["relative_deviation"].as_f64().unwrap() < 1e-8);

    // The exact entry is zero here; the deviation must stay finite.
    let out = run(&["invert", "--preset", "tridiag", "--N", "50", "--lambda-prime", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    // λ′ = ½ is an eigenvalue of T_100: the formula has a pole.
    let out = run(&["invert", "--preset", "tridiag", "--N", "100", "--lambda-prime", "0.5"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(report(&out)["error"]["kind"], "near_eigenvalue");

    let timing = dir.path().join("timing.json");
    let out = run(&["bench", "--preset", "tridiag", "--N", "32", "--timing", timing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let t: Value = serde_json::from_str(&std::fs::read_to_string(&timing).unwrap()).unwrap();
    assert!(t["timing"]["matvec_fft"].as_f64().unwrap() > 0.0);
    assert_eq!(run(&["bench", "--preset", "tridiag", "--N", "32", "--runs", "3"]).status.code(), Some(2));
}

#[test]
fn thread_cap_is_validated() {
    let ok = Command::new(env!("CARGO_BIN_EXE_toeplitz-spectra"))
        .env("TOEPLITZ_SPECTRA_THREADS", "2")
        .args(["predictor", "--preset", "ar1", "--M", "8"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_toeplitz-spectra"))
        .env("TOEPLITZ_SPECTRA_THREADS", "zero")
        .args(["predictor", "--preset", "ar1", "--M", "8"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
