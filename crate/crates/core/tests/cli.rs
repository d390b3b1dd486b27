//! End-to-end runs of the `expfun` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn expfun(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expfun")).args(args).env_remove("EXPFUN_SEED").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn json_run(args: &[&str]) -> (i32, Value) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let mut all: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap();
    all.extend(["--output", p]);
    let o = expfun(&all);
    assert!(path.exists(), "no report written: {}", String::from_utf8_lossy(&o.stderr));
    (code(&o), json_file(&path))
}

fn assert_common_fields(j: &Value) {
    for key in ["tool", "version", "command", "model", "query", "verdict", "value", "error_estimate", "method_used"] {
        assert!(j.get(key).is_some(), "missing `{key}` in {j}");
    }
    assert_eq!(j["tool"], "expfun");
    assert_eq!(j["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn dufresne_second_moment() {
    let (c, j) =
        json_run(&["moment", "--model", "brownian-drift", "--mu", "6", "--sigma", "2", "--n", "2", "--t", "inf"]);
    assert_eq!(c, 0);
    assert_common_fields(&j);
    assert_eq!(j["verdict"], "finite");
    assert!((j["value"].as_f64().unwrap() - 0.125).abs() < 1e-12);
    assert_eq!(j["query"]["t"], "inf");
    assert_eq!(j["model"]["params"]["mu"], 6.0);
}

#[test]
fn deterministic_cube() {
    let (c, j) =
        json_run(&["moment", "--model", "deterministic-drift", "--mu", "0", "--n", "3", "--s", "0", "--t", "2"]);
    assert_eq!(c, 0);
    assert_eq!(j["verdict"], "finite");
    assert!((j["value"].as_f64().unwrap() - 8.0).abs() < 1e-10);
}

#[test]
fn gbm_fourth_moment_is_infinite() {
    let (c, j) = json_run(&[
        "moment",
        "--model",
        "gbm-first-hit",
        "--mu",
        "0.25",
        "--sigma",
        "0.7071067812",
        "--n",
        "4",
        "--t",
        "inf",
    ]);
    assert_eq!(c, 0);
    assert_eq!(j["verdict"], "infinite");
    assert_eq!(j["value"], Value::Null);
}

#[test]
fn inconclusive_exits_two() {
    // a one-interval budget cannot resolve the Bessel layers
    let o = expfun(&[
        "moment",
        "--model",
        "bessel-first-hit",
        "--delta",
        "3",
        "--v",
        "0.5",
        "--n",
        "2",
        "--t",
        "5",
        "--method",
        "product",
        "--max-subdivisions",
        "1",
        "--rel-tol",
        "1e-14",
        "--abs-tol",
        "1e-300",
    ]);
    assert_eq!(code(&o), 2, "{}", stdout(&o));
    assert!(stdout(&o).contains("inconclusive"));
}

#[test]
fn usage_and_config_errors_exit_one() {
    assert_eq!(code(&expfun(&["moment", "--model", "nope"])), 1);
    assert_eq!(code(&expfun(&["moment", "--model", "brownian-drift", "--mu", "6"])), 1);
    assert_eq!(code(&expfun(&["moment", "--model", "brownian-drift", "--mu", "6", "--sigma", "-2"])), 1);
    assert_eq!(code(&expfun(&["moment", "--bogus-flag"])), 1);
    assert_eq!(code(&expfun(&["moment", "--model", "brownian-drift", "--mu", "6", "--sigma", "2", "--t", "soon"])), 1);
    assert_eq!(code(&expfun(&["simulate", "--model", "deterministic-drift", "--mu", "1"])), 1);
    assert_eq!(code(&expfun(&[])), 1);
    let err = expfun(&["moment", "--model", "gbm-first-hit", "--mu", "0.25"]);
    assert!(String::from_utf8_lossy(&err.stderr).contains("sigma"));
}

#[test]
fn help_and_version_exit_zero() {
    let h = expfun(&["--help"]);
    assert_eq!(code(&h), 0);
    assert!(stdout(&h).contains("moment"));
    let v = expfun(&["--version"]);
    assert_eq!(code(&v), 0);
    assert!(stdout(&v).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn csv_columns_are_fixed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let o = expfun(&[
        "finiteness",
        "--model",
        "gbm-first-hit",
        "--mu",
        "0.25",
        "--sigma",
        "0.7071067811865476",
        "--max-n",
        "4",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "model,n,s,t,method,verdict,value,error,evaluations");
    let rows: Vec<&str> = lines.collect();
    assert!(rows.iter().any(|r| r.contains(",2,") && r.contains("not-sufficient")));
    assert!(rows.iter().any(|r| r.starts_with("gbm-first-hit,4,") && r.contains("closed-form,infinite")));
}

#[test]
fn finiteness_tables() {
    let (c, j) = json_run(&[
        "finiteness",
        "--model",
        "gbm-first-hit",
        "--mu",
        "0.25",
        "--sigma",
        "0.7071067811865476",
        "--max-n",
        "4",
    ]);
    assert_eq!(c, 0);
    let rows = j["rows"].as_array().unwrap();
    let pairs: Vec<(String, String)> = rows
        .iter()
        .map(|r| (r["sufficient_condition"].as_str().unwrap().into(), r["closed_form"].as_str().unwrap().into()))
        .collect();
    let want =
        [("sufficient", "finite"), ("not-sufficient", "finite"), ("not-sufficient", "finite"), ("n/a", "infinite")];
    for (got, want) in pairs.iter().zip(want) {
        assert_eq!((got.0.as_str(), got.1.as_str()), want);
    }
    assert_eq!(j["critical_index"], "4");

    let (_, j) = json_run(&["finiteness", "--model", "bessel-first-hit", "--delta", "2", "--max-n", "5"]);
    assert!(j["rows"].as_array().unwrap().iter().all(|r| r["sufficient_condition"] == "sufficient"));

    let (_, j) = json_run(&["finiteness", "--model", "brownian-drift", "--mu", "6", "--sigma", "2", "--max-n", "4"]);
    assert_eq!(j["critical_index"], "3");
}

#[test]
fn simulate_is_deterministic_and_agrees() {
    let args = [
        "simulate",
        "--model",
        "brownian-drift",
        "--mu",
        "6",
        "--sigma",
        "2",
        "--n",
        "1",
        "--seed",
        "42",
        "--paths",
        "4000",
        "--horizon",
        "20",
        "--format",
        "json",
    ];
    let a = expfun(&args);
    let b = expfun(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let j: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_common_fields(&j);
    assert_eq!(j["seed"], 42);
    assert_eq!(j["method_used"], "monte-carlo");
    assert!((j["value"].as_f64().unwrap() - 0.25).abs() < 0.01);
    assert!(j["z_score"].as_f64().unwrap() < 3.0);
}

#[test]
fn simulate_gbm_second_moment() {
    let (c, j) = json_run(&[
        "simulate",
        "--model",
        "gbm-first-hit",
        "--mu",
        "0.25",
        "--sigma",
        "0.7071067811865476",
        "--n",
        "2",
        "--paths",
        "50000",
    ]);
    assert_eq!(c, 0);
    assert!((j["value"].as_f64().unwrap() - 2.414).abs() < 0.2);
    assert!(j["z_score"].as_f64().unwrap() < 3.0);
}

#[test]
fn seed_from_environment() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_expfun"));
        cmd.args([
            "simulate",
            "--model",
            "brownian-drift",
            "--mu",
            "6",
            "--sigma",
            "2",
            "--paths",
            "500",
            "--horizon",
            "5",
        ])
        .args(["--format", "json"])
        .args(extra)
        .env_remove("EXPFUN_SEED");
        if let Some(e) = env {
            cmd.env("EXPFUN_SEED", e);
        }
        cmd.output().unwrap()
    };
    let seed_of = |o: &Output| serde_json::from_slice::<Value>(&o.stdout).unwrap()["seed"].as_u64().unwrap();
    assert_eq!(seed_of(&run(None, &[])), 42);
    assert_eq!(seed_of(&run(Some("7"), &[])), 7);
    assert_eq!(seed_of(&run(Some("7"), &["--seed", "9"])), 9);
    assert_eq!(code(&run(Some("x"), &[])), 1);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "command = \"moment\"\n[model]\nname = \"brownian-drift\"\nmu = 6\nsigma = 2\n[query]\nn = 1\nt = \"inf\"\n",
    )
    .unwrap();
    let out = dir.path().join("r.json");
    let o = expfun(&["--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!((json_file(&out)["value"].as_f64().unwrap() - 0.25).abs() < 1e-12);

    let o = expfun(&["--config", cfg.to_str().unwrap(), "moment", "--n", "2", "--format", "json"]);
    let j: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((j["value"].as_f64().unwrap() - 0.125).abs() < 1e-12);

    std::fs::write(&cfg, "[model]\nunknown = 1\n").unwrap();
    assert_eq!(code(&expfun(&["--config", cfg.to_str().unwrap()])), 1);
    assert_eq!(code(&expfun(&["--config", dir.path().join("missing.toml").to_str().unwrap()])), 1);
}

#[test]
fn reproduce_without_simulation() {
    for example in ["dufresne", "gbm", "bessel"] {
        let (c, j) = json_run(&["reproduce", example, "--no-mc"]);
        assert_eq!(c, 0, "{example}: {j}");
        assert_eq!(j["passed"], true);
        assert!(j["rows"].as_array().unwrap().iter().all(|r| r["pass"] == true));
    }
    let o = expfun(&["reproduce", "dufresne", "--no-mc"]);
    let text = stdout(&o);
    let first = text.lines().find(|l| l.trim_start().starts_with("1  gamma oracle")).unwrap();
    assert!(first.contains("0.2500000000") && first.ends_with("PASS"));
}

#[test]
fn reproduce_gbm_lists_the_gap_row() {
    let (c, j) = json_run(&["reproduce", "gbm", "--no-mc"]);
    assert_eq!(c, 0);
    assert!(j["rows"].as_array().unwrap().iter().any(|r| r["n"] == 2 && r["check"] == "sufficiency gap"));
}

#[test]
fn reproduce_bessel_with_simulation() {
    let (c, j) = json_run(&["reproduce", "bessel", "--paths", "4000"]);
    assert_eq!(c, 0, "{j}");
    assert!(j["rows"].as_array().unwrap().iter().any(|r| r["check"] == "monte-carlo" && r["n"] == 1));
    assert_eq!(j["seed"], 42);
}
