//! End-to-end checks of the command-line front end.

use std::process::Command;

use hypercount::acceptance::AcceptanceConfig;
use hypercount::cli::run_with;
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("hypercount").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    Run { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn json(r: &Run) -> Value {
    serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", r.stdout))
}

fn docs(name: &str) -> String {
    std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/").to_string() + name).unwrap()
}

#[test]
fn count_small_instance() {
    let r = run(&["count", "--r", "3", "--m", "2", "--d", "2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r);
    assert_eq!(v["count_exact"], "8");
    assert!((v["count_log"].as_f64().unwrap() - 8f64.ln()).abs() < 1e-12);
}

#[test]
fn count_methods_agree() {
    for method in ["brute", "dp", "dft"] {
        let v = json(&run(&["count", "--r", "3", "--m", "3", "--d", "1", "--method", method]));
        assert_eq!(v["count_exact"], "36", "{method}");
        assert_eq!(v["method"], method);
    }
}

#[test]
fn estimate_empty_degree() {
    let r = run(&["estimate", "--r", "3", "--m", "2", "--d", "0"]);
    assert_eq!(r.code, 0);
    assert_eq!(json(&r)["log_naive"].as_f64(), Some(0.0));
}

#[test]
fn verify_all_suites_pass() {
    let r = run(&["verify", "--r", "3", "--m", "2", "--lambda", "1/2", "--suite", "all"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r);
    assert_eq!(v["passed"], true);
    let clauses = v["clauses"].as_array().unwrap();
    assert!(!clauses.is_empty());
    assert!(clauses.iter().all(|c| c["passed"] == true));
}

#[test]
fn sweep_csv_header() {
    let r = run(&["sweep", "--r", "3", "--m", "3", "--d-from", "0", "--d-to", "2"]);
    assert_eq!(r.code, 0);
    let mut lines = r.stdout.lines();
    assert_eq!(lines.next(), Some("d,log_naive,log_dense,log_exact,ratio"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn switch_census_csv_header() {
    let r = run(&["switch-census", "--m", "2", "--d", "1", "--lmax", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.starts_with("ell,t_ell,t_prev,fwd_total,rev_total,ratio,predicted_ratio\n"));
}

#[test]
fn sample_json_lines_are_regular() {
    let r = run(&["sample", "--r", "3", "--m", "3", "--d", "2", "--count", "4", "--seed", "7"]);
    assert_eq!(r.code, 0);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(lines.len(), 4);
    for l in lines {
        let g = hypercount::Hypergraph::from_json(&serde_json::from_str(l).unwrap()).unwrap();
        assert!(g.is_regular());
    }
}

#[test]
fn psimple_exact_small_case() {
    let v = json(&run(&["psimple", "--r", "3", "--m", "2", "--d", "2"]));
    assert_eq!(v["method"], "exhaustive");
    assert_eq!(v["p_exact"], "8/9");
}

#[test]
fn csv_format_for_records() {
    let r = run(&["count", "--r", "3", "--m", "2", "--d", "2", "--format", "csv"]);
    assert!(r.stdout.starts_with("field,value\n"));
    assert!(r.stdout.contains("count_exact,8\n"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["count", "--r", "1", "--m", "2", "--d", "0"]).code, 2);
    assert_eq!(run(&["count", "--r", "3", "--m", "2", "--d", "9"]).code, 2);
    assert_eq!(run(&["count", "--r", "3", "--m", "6", "--d", "3", "--method", "brute", "--budget", "10"]).code, 3);
    assert_eq!(run(&["verify", "--r", "3", "--m", "2", "--lambda", "0"]).code, 2);
    assert_eq!(run(&["nonsense"]).code, 1);
    assert_eq!(run(&["count", "--r", "x"]).code, 1);
    assert_eq!(run(&["--help"]).code, 0);
}

#[test]
fn deterministic_across_workers() {
    let a =
        run(&["psimple", "--r", "3", "--m", "6", "--d", "3", "--samples", "5000", "--monte-carlo", "--workers", "1"]);
    let b =
        run(&["psimple", "--r", "3", "--m", "6", "--d", "3", "--samples", "5000", "--monte-carlo", "--workers", "4"]);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
    let s1 = run(&["sample", "--r", "3", "--m", "4", "--d", "2", "--count", "3", "--workers", "1"]);
    let s2 = run(&["sample", "--r", "3", "--m", "4", "--d", "2", "--count", "3", "--workers", "3"]);
    assert_eq!(s1.stdout, s2.stdout);
}

#[test]
fn manifest_records_digest() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let r = run(&["count", "--r", "3", "--m", "2", "--d", "2", "--seed", "5", "--manifest", path.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(m["command"], "count");
    assert_eq!(m["seed"], 5);
    assert_eq!(m["args"]["command"]["d"], 2);
    let sha = m["output_sha256"].as_str().unwrap();
    assert_eq!(sha.len(), 64);
    let again =
        run(&["count", "--r", "3", "--m", "2", "--d", "2", "--seed", "5", "--manifest", path.to_str().unwrap()]);
    assert_eq!(again.stdout, r.stdout);
    let m2: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(m2["output_sha256"], m["output_sha256"]);
}

#[test]
fn repro_empty_config_is_noop() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.json");
    std::fs::write(&path, "{}").unwrap();
    let r = run(&["repro", path.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert!(r.stderr.contains("warning"));
    assert_eq!(json(&r)["criteria"].as_array().unwrap().len(), 0);
}

#[test]
fn repro_zero_tolerance_names_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.json");
    let cfg = r#"{"schema_version": 1, "sparse_probability":
        {"r": 3, "m": 10, "d": 2, "samples": 2000, "sigmas": 0.0, "abs_floor": 0.0, "time_limit_secs": 60.0}}"#;
    std::fs::write(&path, cfg).unwrap();
    let r = run(&["repro", path.to_str().unwrap()]);
    assert_eq!(r.code, 4);
    assert!(r.stderr.contains("sparse_probability_law"), "{}", r.stderr);
    assert_eq!(json(&r)["passed"], false);
}

#[test]
fn repro_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("quick.json");
    let full = AcceptanceConfig::shipped();
    let quick = AcceptanceConfig {
        schema_version: full.schema_version,
        seed: full.seed,
        cauchy_integral: full.cauchy_integral,
        h_simple: full.h_simple,
        sum_lemma: full.sum_lemma,
        ..AcceptanceConfig::default()
    };
    std::fs::write(&path, serde_json::to_string(&quick).unwrap()).unwrap();
    let a = run(&["repro", path.to_str().unwrap(), "--workers", "1"]);
    let b = run(&["repro", path.to_str().unwrap(), "--workers", "4"]);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    let csv = run(&["repro", path.to_str().unwrap(), "--format", "csv"]);
    assert!(csv.stdout.starts_with("id,name,passed,measured,tolerance,detail\n"));
}

#[test]
fn repro_rejects_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"schema_version": 99}"#).unwrap();
    assert_eq!(run(&["repro", path.to_str().unwrap()]).code, 2);
    std::fs::write(&path, r#"{"unknown_key": 1}"#).unwrap();
    assert_eq!(run(&["repro", path.to_str().unwrap()]).code, 2);
}

#[test]
fn shipped_docs_match_code() {
    let default: AcceptanceConfig = AcceptanceConfig::from_json(&docs("repro-default.json")).unwrap();
    assert_eq!(default, AcceptanceConfig::shipped());
    let schema: Value = serde_json::from_str(&docs("repro-schema.json")).unwrap();
    assert_eq!(schema, AcceptanceConfig::json_schema());
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_hypercount");
    let ok = Command::new(bin).args(["count", "--r", "3", "--m", "2", "--d", "2"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("\"count_exact\": \"8\""));
    let bad = Command::new(bin).args(["count", "--r", "3", "--m", "2", "--d", "5"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let budget = Command::new(bin)
        .args(["count", "--r", "3", "--m", "6", "--d", "3", "--method", "brute"])
        .env("HYPERCOUNT_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(budget.status.code(), Some(3));
}
