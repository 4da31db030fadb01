//! The `dks` binary: exit codes, seeds, and golden JSON reports.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn dks(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dks"))
        .args(args)
        .env_remove("DKS_SEED")
        .output()
        .unwrap()
}

fn strip_runtime(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("runtime_ms");
            map.values_mut().for_each(strip_runtime);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_runtime),
        _ => {}
    }
}

fn report(out: &Output) -> Value {
    let mut v: Value = serde_json::from_slice(&out.stdout).unwrap();
    strip_runtime(&mut v);
    v
}

fn golden_json(name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(golden(name)).unwrap()).unwrap()
}

fn g(name: &str) -> String {
    golden(name).display().to_string()
}

#[test]
fn distance_exact_golden() {
    let out = dks(&["distance", "--p", &g("p2x2.csv"), "--q", &g("q2x2.csv"), "--dim", "2", "--exact"]);
    assert_eq!(out.status.code(), Some(0));
    let mut v = report(&out);
    assert_eq!(v["value"], 0.5);
    // inputs echo absolute paths; compare the rest
    v["inputs"]["p"] = "p2x2.csv".into();
    v["inputs"]["q"] = "q2x2.csv".into();
    assert_eq!(v, golden_json("distance_exact.json"));
}

#[test]
fn distance_grid_route() {
    let out = dks(&["distance", "--p", &g("p2x2.csv"), "--q", &g("q2x2.csv"), "--dim", "2", "--eps", "0.25"]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    assert_eq!(v["method"], "grid");
    assert_eq!(v["value"], 0.5);
}

#[test]
fn test_command_exit_codes() {
    let same = dks(&["test", "--x", &g("uniform_a.csv"), "--y", &g("uniform_a.csv"), "--dim", "2", "--delta", "0.05"]);
    assert_eq!(same.status.code(), Some(0));
    assert_eq!(report(&same)["reject"], false);

    let shifted = dks(&["test", "--x", &g("uniform_a.csv"), "--y", &g("shifted_b.csv"), "--dim", "2", "--delta", "0.05"]);
    assert_eq!(shifted.status.code(), Some(3));
    let v = report(&shifted);
    assert_eq!(v["reject"], true);
    assert!(v["statistic"].as_f64().unwrap() >= v["threshold"]["eps"].as_f64().unwrap());
}

#[test]
fn validation_errors_exit_2() {
    let ragged = dks(&["distance", "--p", &g("ragged.csv"), "--q", &g("q2x2.csv"), "--dim", "2"]);
    assert_eq!(ragged.status.code(), Some(2));
    let err = String::from_utf8_lossy(&ragged.stderr);
    assert!(err.contains("line 3"), "{err}");

    let missing = dks(&["distance", "--p", "/nonexistent.csv", "--q", &g("q2x2.csv"), "--dim", "2"]);
    assert_eq!(missing.status.code(), Some(2));

    let bad_eps = dks(&["distance", "--p", &g("p2x2.csv"), "--q", &g("q2x2.csv"), "--dim", "2", "--eps", "0"]);
    assert_eq!(bad_eps.status.code(), Some(2));

    let unequal = dks(&["test", "--x", &g("p2x2.csv"), "--y", &g("three_points.csv"), "--dim", "2"]);
    assert_eq!(unequal.status.code(), Some(2));

    let no_args = dks(&["distance"]);
    assert_eq!(no_args.status.code(), Some(2));
}

#[test]
fn internal_errors_exit_1() {
    let out = dks(&[
        "distance", "--p", &g("p2x2.csv"), "--q", &g("q2x2.csv"), "--dim", "2", "--out", "/nonexistent/dir/r.json",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn instability_golden() {
    let out = dks(&["instability", "--case", "diagonal", "--alpha", "0.5", "--n", "400", "--with-dagger"]);
    assert_eq!(out.status.code(), Some(0));
    let with = report(&out);
    assert_eq!(with, golden_json("instability_diagonal_dagger.json"));

    let without = report(&dks(&["instability", "--case", "diagonal", "--alpha", "0.5", "--n", "400"]));
    let ratio = with["mdks_all"].as_f64().unwrap() / without["mdks_all"].as_f64().unwrap();
    assert!(ratio >= 1.8, "{ratio}");
    let delta = with["exact_dks"].as_f64().unwrap() - without["exact_dks"].as_f64().unwrap();
    assert!(delta.abs() <= 2.0 / 400.0);
}

#[test]
fn seed_flag_env_and_determinism() {
    let args = ["distance", "--p", &g("cloud3_a.csv"), "--q", &g("cloud3_b.csv"), "--dim", "3", "--eps", "0.5"];
    let a = dks(&args);
    let b = dks(&args);
    assert_eq!(report(&a), report(&b));
    assert_eq!(report(&a)["inputs"]["seed"], dks::seed::DEFAULT_SEED);

    let env = Command::new(env!("CARGO_BIN_EXE_dks")).args(args).env("DKS_SEED", "42").output().unwrap();
    assert_eq!(report(&env)["inputs"]["seed"], 42);
    let mut flag_args = args.to_vec();
    flag_args.extend(["--seed", "42"]);
    let flag = dks(&flag_args);
    assert_eq!(report(&flag), report(&env));
}

#[test]
fn bench_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    let svg = dir.path().join("b.svg");
    let out = dks(&[
        "bench", "--preset", "uniform2d", "--n-min", "128", "--n-max", "512", "--repeats", "2",
        "--out-csv", csv.to_str().unwrap(), "--out-svg", svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(&csv).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("n,method,mean_runtime_ms,mean_observed_error,repeats"));
    assert_eq!(lines.count(), 6);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<polyline"));
    let v = report(&out);
    assert_eq!(v["rows"].as_array().unwrap().len(), 6);
}
