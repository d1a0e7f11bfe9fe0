use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rscancel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rscancel")).args(args).env_remove("RS_CANCEL_SEED").output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn instructive_preset_presents_b_squared() {
    let tmp = tempfile::tempdir().unwrap();
    let out = rscancel(&["build", "--preset", "instructive", "--out", path(tmp.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read_to_string(tmp.path().join("presentation.txt")).unwrap(), "gens: a b\nrel: b^2\n");
    let report = json(&tmp.path().join("report.json"));
    assert_eq!(report["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(report["config_hash"].as_str().unwrap().len(), 64);
    // not certified, yet the exit code is 0
    assert_eq!(report["small_cancellation"]["passes"]["1/6"], false);
}

#[test]
fn malformed_coefficients_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, "[[1, 2, 3, 4]]").unwrap();
    let out = rscancel(&["build", "--coefficients", path(&bad), "--n", "1", "--out", path(&tmp.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
    std::fs::write(&bad, "[[1, 2,").unwrap();
    let out = rscancel(&["coefficients", "check", "--file", path(&bad)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_distinctness_exits_1_without_gamma() {
    let tmp = tempfile::tempdir().unwrap();
    let f = tmp.path().join("c.json");
    std::fs::write(&f, "[[1, 2, 3, 4, 5]]").unwrap();
    let out = rscancel(&["coefficients", "check", "--file", path(&f)]);
    assert_eq!(out.status.code(), Some(1));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["pass"], false);
}

#[test]
fn pg27_build_reports_lambda_3() {
    let tmp = tempfile::tempdir().unwrap();
    let out = rscancel(&["build", "--underlying-preset", "pg27", "--lambda", "11/12", "--out", path(tmp.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&tmp.path().join("report.json"));
    assert_eq!(r["small_cancellation"]["lambda_piece"], serde_json::json!({"finite": 3}));
    assert_eq!(r["small_cancellation"]["gamma"], 6);
    assert_eq!(r["phi"]["girth"], 6);
    assert_eq!(r["witnesses"]["count"], 456);
    assert!(tmp.path().join("gamma.dot").exists());
}

#[test]
fn seed_falls_back_to_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert!(rscancel(&["build", "--n", "10", "--seed", "4", "--out", path(&a)]).status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_rscancel"))
        .args(["build", "--n", "10", "--out", path(&b)])
        .env("RS_CANCEL_SEED", "4")
        .output()
        .unwrap();
    assert!(out.status.success());
    for f in ["report.json", "gamma.json", "presentation.txt"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn config_file_and_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    std::fs::write(&cfg, "lambda = \"1/8\"\n[underlying]\nn = 10\nseed = 2\n").unwrap();
    let out = tmp.path().join("o");
    assert!(rscancel(&["build", "--config", path(&cfg), "--seed", "3", "--out", path(&out)]).status.success());
    let r = json(&out.join("report.json"));
    assert_eq!(r["config"]["lambda"], "1/8");
    assert_eq!(r["config"]["underlying"]["Generate"]["seed"], 3);
    std::fs::write(&cfg, "colour = 1\n").unwrap();
    assert_eq!(rscancel(&["build", "--config", path(&cfg)]).status.code(), Some(2));
    assert_eq!(rscancel(&["build", "--lambda", "2"]).status.code(), Some(2));
}

#[test]
fn check_verify_and_dehn_on_instructive() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(rscancel(&["build", "--preset", "instructive", "--out", path(tmp.path())]).status.success());
    let g = tmp.path().join("gamma.json");
    let out = rscancel(&["check", "--graph", path(&g), "--lambda", "1/6"]);
    assert!(out.status.success());
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["criterion_value"], "3");

    let out = rscancel(&["verify", "--graph", path(&g), "--witnesses", path(&tmp.path().join("witnesses.json"))]);
    assert!(out.status.success());
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    let status: Vec<&str> = r["clauses"].as_array().unwrap().iter().map(|c| c["status"].as_str().unwrap()).collect();
    assert_eq!(status, ["SKIPPED", "SKIPPED", "PASS", "SKIPPED"]);

    // refused without --unsafe
    assert_eq!(rscancel(&["dehn", "--word", "a b^2 a^-1", "--graph", path(&g)]).status.code(), Some(1));
    let out = rscancel(&["dehn", "--word", "a b^2 a^-1", "--graph", path(&g), "--unsafe"]);
    assert!(out.status.success());
    let lines: Vec<Value> = String::from_utf8(out.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[1]["verdict"], "trivial");
    assert_eq!(lines[1]["definitive"], false);
    assert_eq!(rscancel(&["dehn", "--word", "a^x", "--graph", path(&g), "--unsafe"]).status.code(), Some(2));
}

#[test]
fn dehn_on_a_certified_cycle() {
    let tmp = tempfile::tempdir().unwrap();
    let g = tmp.path().join("cycle.json");
    std::fs::write(&g, rscancel::graph::io::to_json(&rscancel::LabeledGraph::exponent_cycle(21))).unwrap();
    let out = rscancel(&["dehn", "--word", "a b", "--graph", path(&g), "--lambda", "1/8"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let last: Value = serde_json::from_str(String::from_utf8(out.stdout).unwrap().lines().last().unwrap()).unwrap();
    assert_eq!(last["verdict"], "nontrivial");
    assert_eq!(last["definitive"], true);
}

#[test]
fn genericity_csv_is_deterministic() {
    let run = || rscancel(&["genericity", "few-relator", "--t", "4,6", "--trials", "5000", "--seed", "3", "--exact"]);
    let (a, b) = (run(), run());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "param,estimate,ci_low,ci_high,trials,seed,exact");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("4,"));

    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("g.csv");
    let out = rscancel(&["genericity", "graphical", "--cycle", "4", "--j", "3", "--threshold", "2,6", "--trials", "500", "--out", path(&csv)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("param,estimate,ci_low,ci_high,trials,seed,collapsed\n"));
    assert_eq!(rscancel(&["genericity", "graphical", "--j", "3", "--threshold", "2"]).status.code(), Some(2));
}

#[test]
fn coefficient_and_underlying_files_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let c = tmp.path().join("c.json");
    assert!(rscancel(&["coefficients", "generate", "--count", "9", "--out", path(&c)]).status.success());
    let out = rscancel(&["coefficients", "check", "--file", path(&c)]);
    assert!(out.status.success());
    let u = tmp.path().join("u.json");
    assert!(rscancel(&["underlying", "generate", "--n", "9", "--seed", "1", "--out", path(&u)]).status.success());
    let out = rscancel(&["underlying", "load", "--file", path(&u)]);
    assert!(out.status.success());
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["n"], 9);
    let o = tmp.path().join("o");
    let out = rscancel(&["build", "--coefficients", path(&c), "--underlying", path(&u), "--out", path(&o)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&o.join("report.json"))["gamma"]["a_lines"], 9);
}
