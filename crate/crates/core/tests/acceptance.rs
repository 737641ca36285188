//! One test per acceptance criterion, each printing a single pass/fail line
//! to stderr (written directly, so it shows even when output is captured).
//! The `repro` subcommand prints the same table.

use std::io::Write;

use hypercount::acceptance::{run_criterion, AcceptanceConfig};

fn check(id: u32) {
    let cfg = AcceptanceConfig::shipped();
    let res = run_criterion(&cfg, id).expect("criterion present in the shipped config");
    let _ = writeln!(std::io::stderr(), "{res} [{:.1}s]", res.elapsed_secs);
    assert!(res.passed, "{res}");
}

#[test]
fn criterion_01_exact_counter_agreement() {
    check(1);
}

#[test]
fn criterion_02_cauchy_integral_exactness() {
    check(2);
}

#[test]
fn criterion_03_configuration_identity() {
    check(3);
}

#[test]
fn criterion_04_switching_double_counting() {
    check(4);
}

#[test]
fn criterion_05_sparse_probability_law() {
    check(5);
}

#[test]
fn criterion_06_sum_lemma_bracketing() {
    check(6);
}

#[test]
fn criterion_07_dense_machinery_identities() {
    check(7);
}

#[test]
fn criterion_08_theorem_trend() {
    check(8);
}

#[test]
fn criterion_09_stirling_dense_consistency() {
    check(9);
}

#[test]
fn criterion_10_sampler_uniformity() {
    check(10);
}
