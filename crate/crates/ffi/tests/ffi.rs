//! Exercises the C ABI from Rust, checks the generated header, and links a
//! small C program against the static library.

use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use hypercount_ffi::*;

fn last_error() -> String {
    let p = hc_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn params(r: u32, m: u32, d: u64) -> *mut HcParams {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { hc_params_new(r, m, d, &mut p) }, HcStatus::Ok);
    p
}

unsafe fn take_string(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    hc_string_free(s);
    out
}

#[test]
fn count_returns_decimal_string() {
    let p = params(3, 2, 2);
    let mut log = 0.0;
    let mut exact = ptr::null_mut();
    unsafe {
        assert_eq!(hc_count(p, HcMethod::Auto, 0, &mut log, &mut exact), HcStatus::Ok);
        assert_eq!(take_string(exact), "8");
        assert!((log - 8f64.ln()).abs() < 1e-12);
        assert_eq!(hc_count(p, HcMethod::Integral, 0, &mut log, &mut exact), HcStatus::Ok);
        assert!(exact.is_null());
        assert!((log - 8f64.ln()).abs() < 1e-6);
        hc_params_free(p);
    }
}

#[test]
fn status_codes() {
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(hc_params_new(3, 2, 5, &mut p), HcStatus::Domain);
        assert!(p.is_null());
        assert!(last_error().contains("exceeds"));
        assert_eq!(hc_params_new(3, 2, 1, ptr::null_mut()), HcStatus::NullPointer);
        let q = params(3, 6, 3);
        let mut log = 0.0;
        assert_eq!(hc_count(q, HcMethod::Brute, 10, &mut log, ptr::null_mut()), HcStatus::Budget);
        assert!(last_error().contains("budget"));
        assert_eq!(hc_count(ptr::null(), HcMethod::Auto, 0, &mut log, ptr::null_mut()), HcStatus::NullPointer);
        hc_params_free(q);
        let mut passed = false;
        let bad = [0xffu8, 0];
        assert_eq!(
            hc_verify(3, 2, bad.as_ptr().cast(), HcSuite::All, 0, &mut passed, ptr::null_mut()),
            HcStatus::InvalidUtf8
        );
        let zero = CString::new("0").unwrap();
        assert_eq!(hc_verify(3, 2, zero.as_ptr(), HcSuite::All, 0, &mut passed, ptr::null_mut()), HcStatus::Domain);
    }
}

#[test]
fn multigraph_params_only_for_simplicity() {
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(hc_params_new_multigraph(3, 1, 2, &mut p), HcStatus::Ok);
        let (mut prob, mut se) = (0.0, 0.0);
        assert_eq!(hc_simplicity_probability(p, 100, 1, &mut prob, &mut se), HcStatus::Ok);
        assert_eq!(prob, 0.0);
        let mut log = 0.0;
        assert_eq!(hc_count(p, HcMethod::Auto, 0, &mut log, ptr::null_mut()), HcStatus::Domain);
        hc_params_free(p);
    }
}

#[test]
fn estimates() {
    let p = params(3, 4, 2);
    unsafe {
        let (mut naive, mut dense) = (0.0, 0.0);
        assert_eq!(hc_log_naive(p, &mut naive), HcStatus::Ok);
        assert_eq!(hc_log_dense(p, &mut dense), HcStatus::Ok);
        let mut json = ptr::null_mut();
        assert_eq!(hc_estimate_json(p, 0, &mut json), HcStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(v["log_naive"].as_f64(), Some(naive));
        assert_eq!(v["log_dense"].as_f64(), Some(dense));
        assert!(v["log_exact"].is_number());
        hc_params_free(p);
        let empty = params(3, 4, 0);
        assert_eq!(hc_log_dense(empty, &mut dense), HcStatus::Domain);
        hc_params_free(empty);
    }
}

#[test]
fn simplicity_exact_and_seeded() {
    let p = params(3, 2, 2);
    unsafe {
        let (mut prob, mut se) = (0.0, 1.0);
        assert_eq!(hc_simplicity_probability(p, 1000, 3, &mut prob, &mut se), HcStatus::Ok);
        assert!((prob - 8.0 / 9.0).abs() < 1e-15);
        assert_eq!(se, 0.0);
        hc_params_free(p);
    }
}

#[test]
fn sample_matches_cli_stream() {
    let p = params(3, 3, 2);
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(hc_sample(p, 7, 10_000, &mut g), HcStatus::Ok);
        let mut n = 0usize;
        assert_eq!(hc_hypergraph_num_edges(g, &mut n), HcStatus::Ok);
        assert_eq!(n, 6);
        let mut coords = [0u32; 3];
        assert_eq!(hc_hypergraph_edge(g, 0, coords.as_mut_ptr(), 3), HcStatus::Ok);
        assert!(coords.iter().all(|&c| (1..=3).contains(&c)));
        assert_eq!(hc_hypergraph_edge(g, 0, coords.as_mut_ptr(), 2), HcStatus::Domain);
        assert_eq!(hc_hypergraph_edge(g, 6, coords.as_mut_ptr(), 3), HcStatus::Domain);
        let mut json = ptr::null_mut();
        assert_eq!(hc_hypergraph_to_json(g, &mut json), HcStatus::Ok);
        let ffi_json = take_string(json);
        hc_hypergraph_free(g);
        hc_params_free(p);

        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = ["hypercount", "sample", "--r", "3", "--m", "3", "--d", "2", "--seed", "7", "--max-tries", "10000"];
        assert_eq!(hypercount::cli::run_with(argv, &mut out, &mut err), 0);
        assert_eq!(String::from_utf8(out).unwrap().trim_end(), ffi_json);
    }
}

#[test]
fn verify_reports_clauses() {
    let lambda = CString::new("1/2").unwrap();
    let mut passed = false;
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(hc_verify(3, 2, lambda.as_ptr(), HcSuite::All, 1, &mut passed, &mut json), HcStatus::Ok);
        assert!(passed);
        let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert!(!v["clauses"].as_array().unwrap().is_empty());
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(hc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn crate_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn header() -> PathBuf {
    crate_dir().join("include/hypercount.h")
}

#[test]
fn header_declares_every_export() {
    let text = std::fs::read_to_string(header()).unwrap();
    let src = std::fs::read_to_string(crate_dir().join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = src.split("extern \"C\" fn ").skip(1).map(|s| s.split('(').next().unwrap()).collect();
    assert!(exports.len() >= 15);
    for name in exports {
        assert!(text.contains(&format!("{name}(")), "{name} missing from header");
    }
    for opaque in ["typedef struct HcParams HcParams;", "typedef struct HcHypergraph HcHypergraph;"] {
        assert!(text.contains(opaque));
    }
}

fn c_compiler() -> Option<String> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".to_string());
    Command::new(&cc).arg("--version").output().ok().filter(|o| o.status.success()).map(|_| cc)
}

/// The directory holding this test binary's sibling build artifacts.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let Some(cc) = c_compiler() else {
        panic!("a C compiler is required for the header test");
    };
    let lib = artifact_dir().join("libhypercount_ffi.a");
    assert!(lib.exists(), "static library not built at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
