//! The acceptance suite: ten end-to-end criteria driven by a declarative
//! experiment file. Shared by the `repro` subcommand and the integration
//! tests.

use std::collections::HashMap;
use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::analytic::{gaussian_moments, run_suite, DenseParams, Suite};
use crate::configmodel::{
    h_from_configuration_identity, rejection_samples, simplicity_exhaustive, simplicity_monte_carlo, EXHAUSTIVE_LIMIT,
};
use crate::error::{Error, Result};
use crate::estimate::{log_dense_estimate, log_naive_estimate, stirling_binomial_log};
use crate::exact::{count_bruteforce, count_dft, count_reduced_integral, count_slab_dp, list_regular, Budget};
use crate::hypergraph::{make_params, Params};
use crate::numeric::{ln_binomial, BigCount};
use crate::rng::RngStream;
use crate::switching::{double_counting_check, random_sum_lemma_input, sum_lemma_bounds, SumLemmaInput};

/// Version of the experiment-file format.
pub const SCHEMA_VERSION: u32 = 1;

/// Exact counters agree on every small instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ExactAgreement {
    pub max_cells: u64,
    pub time_limit_secs: f64,
}

/// Reduced Cauchy integral reproduces exact counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CauchyIntegral {
    pub cases: Vec<[u64; 3]>,
    pub rel_tol: f64,
    pub time_limit_secs: f64,
}

/// Configuration-model identity with exhaustive simplicity probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct HSimple {
    pub cases: Vec<[u64; 3]>,
}

/// Forward switchings out of `T(l)` equal reverse switchings out of `T(l-1)`,
/// at `r = 3`; cases are `(m, d, l)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct DoubleCounting {
    pub cases: Vec<[u64; 3]>,
    pub time_limit_secs: f64,
}

/// Monte Carlo simplicity probability against `exp(-d^2 / 2m)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SparseProbability {
    pub r: u32,
    pub m: u32,
    pub d: u64,
    pub samples: u64,
    /// Allowed gap is `max(sigmas * std_err, abs_floor)`.
    pub sigmas: f64,
    pub abs_floor: f64,
    pub time_limit_secs: f64,
}

/// Summation-lemma brackets on random inputs and the exponential series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SumLemma {
    pub random_inputs: u64,
}

/// Full analytic verification grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct DenseIdentities {
    pub r: Vec<u32>,
    pub m: Vec<u32>,
    pub lambda: Vec<String>,
    /// `(r, m, lambda)` where the pseudovariance combination is compared
    /// with `-r / (12 Lambda m^(r-2))`.
    pub combo_point: (u32, u32, String),
    /// The allowed gap is `combo_constant / n`.
    pub combo_constant: f64,
    pub time_limit_secs: f64,
}

/// `|log H - log H_hat|` shrinking along `m` at fixed `r`, `d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct TheoremTrend {
    pub r: u32,
    pub d: u64,
    pub m: Vec<u32>,
    pub final_gap: f64,
    pub time_limit_secs: f64,
}

/// Dense formula against the independence estimate, and Stirling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct StirlingDense {
    pub points: Vec<(u32, u32, String)>,
    pub dense_tol: f64,
    pub stirling_n: u64,
    pub stirling_tol: f64,
}

/// Chi-square goodness of fit of rejection samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SamplerUniformity {
    pub r: u32,
    pub m: u32,
    pub d: u64,
    pub samples: u64,
    pub significance: f64,
    pub max_tries: u64,
}

/// A declarative experiment file. Absent criteria are not run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct AcceptanceConfig {
    #[serde(default)]
    pub schema_version: Option<u32>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub exact_agreement: Option<ExactAgreement>,
    #[serde(default)]
    pub cauchy_integral: Option<CauchyIntegral>,
    #[serde(default)]
    pub h_simple: Option<HSimple>,
    #[serde(default)]
    pub double_counting: Option<DoubleCounting>,
    #[serde(default)]
    pub sparse_probability: Option<SparseProbability>,
    #[serde(default)]
    pub sum_lemma: Option<SumLemma>,
    #[serde(default)]
    pub dense_identities: Option<DenseIdentities>,
    #[serde(default)]
    pub theorem_trend: Option<TheoremTrend>,
    #[serde(default)]
    pub stirling_dense: Option<StirlingDense>,
    #[serde(default)]
    pub sampler_uniformity: Option<SamplerUniformity>,
}

/// Default seed of the shipped configuration.
pub const DEFAULT_SEED: u64 = 20240917;

impl AcceptanceConfig {
    /// The configuration shipped as `docs/repro-default.json`.
    pub fn shipped() -> Self {
        let half = || "1/2".to_string();
        AcceptanceConfig {
            schema_version: Some(SCHEMA_VERSION),
            seed: Some(DEFAULT_SEED),
            exact_agreement: Some(ExactAgreement { max_cells: 27, time_limit_secs: 300.0 }),
            cauchy_integral: Some(CauchyIntegral {
                cases: vec![[2, 2, 1], [3, 2, 1], [3, 2, 2], [3, 2, 3]],
                rel_tol: 1e-6,
                time_limit_secs: 60.0,
            }),
            h_simple: Some(HSimple { cases: vec![[3, 2, 1], [3, 2, 2]] }),
            double_counting: Some(DoubleCounting {
                cases: vec![[2, 2, 1], [3, 2, 1], [3, 2, 2]],
                time_limit_secs: 600.0,
            }),
            sparse_probability: Some(SparseProbability {
                r: 3,
                m: 50,
                d: 5,
                samples: 100_000,
                sigmas: 3.0,
                abs_floor: 0.02,
                time_limit_secs: 120.0,
            }),
            sum_lemma: Some(SumLemma { random_inputs: 1000 }),
            dense_identities: Some(DenseIdentities {
                r: vec![3, 4, 5],
                m: vec![2, 3, 5],
                lambda: vec!["1/10".into(), half(), "9/10".into()],
                combo_point: (3, 200, half()),
                combo_constant: 10.0,
                time_limit_secs: 300.0,
            }),
            theorem_trend: Some(TheoremTrend {
                r: 3,
                d: 2,
                m: vec![2, 3, 4, 5, 6],
                final_gap: 0.05,
                time_limit_secs: 600.0,
            }),
            stirling_dense: Some(StirlingDense {
                points: vec![(3, 40, half()), (4, 10, half())],
                dense_tol: 0.01,
                stirling_n: 100,
                stirling_tol: 1e-6,
            }),
            sampler_uniformity: Some(SamplerUniformity {
                r: 3,
                m: 2,
                d: 2,
                samples: 100_000,
                significance: 0.001,
                max_tries: 10_000,
            }),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: AcceptanceConfig =
            serde_json::from_str(text).map_err(|e| Error::domain(format!("invalid experiment file: {e}")))?;
        if let Some(v) = cfg.schema_version {
            if v != SCHEMA_VERSION {
                return Err(Error::domain(format!("unsupported schema_version {v}, expected {SCHEMA_VERSION}")));
            }
        }
        Ok(cfg)
    }

    /// JSON Schema of the experiment file.
    pub fn json_schema() -> serde_json::Value {
        serde_json::to_value(schemars::schema_for!(AcceptanceConfig)).unwrap_or_default()
    }

    pub fn is_empty(&self) -> bool {
        self.enabled().is_empty()
    }

    /// Ids of the criteria present in this file.
    pub fn enabled(&self) -> Vec<u32> {
        let flags = [
            self.exact_agreement.is_some(),
            self.cauchy_integral.is_some(),
            self.h_simple.is_some(),
            self.double_counting.is_some(),
            self.sparse_probability.is_some(),
            self.sum_lemma.is_some(),
            self.dense_identities.is_some(),
            self.theorem_trend.is_some(),
            self.stirling_dense.is_some(),
            self.sampler_uniformity.is_some(),
        ];
        (1..=10).zip(flags).filter(|(_, f)| *f).map(|(i, _)| i).collect()
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

/// Outcome of one criterion.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    /// The headline measured quantity.
    pub measured: f64,
    /// The bound `measured` was held to.
    pub tolerance: f64,
    pub detail: String,
    /// Wall-clock seconds; kept out of the JSON so reports are reproducible.
    #[serde(skip)]
    pub elapsed_secs: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {}: measured {:.6e}, tolerance {:.6e}; {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.tolerance,
            self.detail
        )
    }
}

/// Build a result and apply the runtime limit.
#[allow(clippy::too_many_arguments)]
fn finish(
    id: u32,
    name: &'static str,
    start: Instant,
    limit: Option<f64>,
    passed: bool,
    measured: f64,
    tolerance: f64,
    mut detail: String,
) -> CriterionResult {
    let elapsed = start.elapsed().as_secs_f64();
    let mut passed = passed;
    if let Some(limit) = limit {
        if elapsed > limit {
            passed = false;
            detail.push_str(&format!("; runtime {elapsed:.1}s exceeds {limit}s"));
        }
    }
    CriterionResult { id, name, passed, measured, tolerance, detail, elapsed_secs: elapsed }
}

fn errored(id: u32, name: &'static str, start: Instant, e: &Error) -> CriterionResult {
    finish(id, name, start, None, false, f64::NAN, f64::NAN, format!("error: {e}"))
}

fn params3(c: &[u64; 3]) -> Result<Params> {
    let r = u32::try_from(c[0]).map_err(|_| Error::domain("r out of range"))?;
    let m = u32::try_from(c[1]).map_err(|_| Error::domain("m out of range"))?;
    make_params(r, m, c[2])
}

/// Criterion 1: brute force, slab DP (r = 3) and DFT agree exactly on every
/// `(r, m, d)` with `m^r <= max_cells` and every in-budget `d`.
pub fn exact_agreement(cfg: &ExactAgreement) -> CriterionResult {
    const NAME: &str = "exact_counter_agreement";
    let start = Instant::now();
    let budget = Budget::default();
    let mut instances = Vec::new();
    for r in 2u32..=8 {
        for m in 1u32.. {
            let cells = u64::from(m).checked_pow(r);
            match cells {
                Some(c) if c <= cfg.max_cells => {}
                _ => break,
            }
            for d in 0..=u64::from(m).pow(r - 1) {
                instances.push((r, m, d));
            }
        }
    }
    let outcomes: Vec<std::result::Result<Option<String>, String>> = instances
        .par_iter()
        .map(|&(r, m, d)| {
            let p = make_params(r, m, d).map_err(|e| e.to_string())?;
            let brute = match count_bruteforce(&p, &budget) {
                Ok(c) => c,
                Err(Error::BudgetExceeded { .. }) => return Ok(None),
                Err(e) => return Err(format!("({r},{m},{d}) brute: {e}")),
            };
            let dft = count_dft(&p, &budget).map_err(|e| format!("({r},{m},{d}) dft: {e}"))?;
            if dft != brute {
                return Err(format!("({r},{m},{d}): brute {brute} != dft {dft}"));
            }
            if r == 3 {
                let dp = count_slab_dp(&p, &budget).map_err(|e| format!("({r},{m},{d}) dp: {e}"))?;
                if dp != brute {
                    return Err(format!("({r},{m},{d}): brute {brute} != dp {dp}"));
                }
            }
            Ok(Some(format!("H_{r}({d},{m})={brute}")))
        })
        .collect();
    let mut failures = Vec::new();
    let mut checked = 0u64;
    let mut skipped = 0u64;
    let mut named = Vec::new();
    for (o, &(r, m, d)) in outcomes.iter().zip(&instances) {
        match o {
            Ok(Some(s)) => {
                checked += 1;
                if [(3, 2, 1), (3, 2, 2), (3, 3, 1), (2, 3, 2)].contains(&(r, m, d)) {
                    named.push(s.clone());
                }
            }
            Ok(None) => skipped += 1,
            Err(e) => failures.push(e.clone()),
        }
    }
    let detail = if failures.is_empty() {
        format!("{checked} instances agree, {skipped} out of budget; {}", named.join(", "))
    } else {
        format!("{} disagreements: {}", failures.len(), failures.join("; "))
    };
    finish(
        1,
        NAME,
        start,
        Some(cfg.time_limit_secs),
        failures.is_empty() && checked > 0,
        failures.len() as f64,
        0.0,
        detail,
    )
}

/// Criterion 2: `exp(count_reduced_integral)` matches the exact count.
pub fn cauchy_integral(cfg: &CauchyIntegral) -> CriterionResult {
    const NAME: &str = "cauchy_integral_exactness";
    let start = Instant::now();
    let budget = Budget::default();
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for c in &cfg.cases {
        let run = || -> Result<f64> {
            let p = params3(c)?;
            let exact = count_bruteforce(&p, &budget)?;
            let log = count_reduced_integral(&p, &budget)?;
            Ok((log.ln() - exact.ln()).exp_m1().abs())
        };
        match run() {
            Ok(rel) => {
                worst = worst.max(rel);
                parts.push(format!("({},{},{}) rel {rel:.2e}", c[0], c[1], c[2]));
            }
            Err(e) => return errored(2, NAME, start, &e),
        }
    }
    finish(2, NAME, start, Some(cfg.time_limit_secs), worst <= cfg.rel_tol, worst, cfg.rel_tol, parts.join(", "))
}

/// Criterion 3: exhaustive `P` plugged into the configuration identity
/// reproduces the exact count.
pub fn h_simple(cfg: &HSimple) -> CriterionResult {
    const NAME: &str = "configuration_identity";
    let start = Instant::now();
    let mut bad = 0u32;
    let mut parts = Vec::new();
    for c in &cfg.cases {
        let run = || -> Result<(String, BigCount, BigCount)> {
            let p = params3(c)?;
            let est = simplicity_exhaustive(&p, EXHAUSTIVE_LIMIT)?;
            let prob = est.p_exact.ok_or_else(|| Error::check("exhaustive mode lacks an exact value"))?;
            let h = h_from_configuration_identity(&p, &prob)?;
            let exact = count_bruteforce(&p, &Budget::default())?;
            Ok((format!("{}/{}", prob.numer(), prob.denom()), h, exact))
        };
        match run() {
            Ok((prob, h, exact)) => {
                if h != exact {
                    bad += 1;
                }
                parts.push(format!("({},{},{}) P = {prob}, H = {h}, exact {exact}", c[0], c[1], c[2]));
            }
            Err(e) => return errored(3, NAME, start, &e),
        }
    }
    finish(3, NAME, start, None, bad == 0, f64::from(bad), 0.0, parts.join("; "))
}

/// Criterion 4: forward switchings out of `T(l)` equal reverse switchings
/// out of `T(l-1)`, by exhaustive census at `r = 3`.
pub fn double_counting(cfg: &DoubleCounting) -> CriterionResult {
    const NAME: &str = "switching_double_counting";
    let start = Instant::now();
    let mut bad = 0u32;
    let mut parts = Vec::new();
    for c in &cfg.cases {
        let run = || -> Result<(BigCount, BigCount)> {
            let u = |v: u64| u32::try_from(v).map_err(|_| Error::domain("m out of range"));
            let p = crate::hypergraph::make_multigraph_params(3, u(c[0])?, c[1])?;
            double_counting_check(&p, c[2], EXHAUSTIVE_LIMIT)
        };
        match run() {
            Ok((fwd, rev)) => {
                if fwd != rev {
                    bad += 1;
                }
                parts.push(format!("(m={},d={},l={}) forward {fwd}, reverse {rev}", c[0], c[1], c[2]));
            }
            Err(e) => return errored(4, NAME, start, &e),
        }
    }
    finish(4, NAME, start, Some(cfg.time_limit_secs), bad == 0, f64::from(bad), 0.0, parts.join("; "))
}

/// Criterion 5: Monte Carlo `P_hat` within `max(3 std_err, 0.02)` of
/// `exp(-d^2 / 2m)`.
pub fn sparse_probability(cfg: &SparseProbability, seed: u64) -> CriterionResult {
    const NAME: &str = "sparse_probability_law";
    let start = Instant::now();
    let p = match make_params(cfg.r, cfg.m, cfg.d) {
        Ok(p) => p,
        Err(e) => return errored(5, NAME, start, &e),
    };
    let est = simplicity_monte_carlo(&p, cfg.samples, RngStream::new(seed, 5));
    let (d, m) = (cfg.d as f64, f64::from(cfg.m));
    let target = (-d * d / (2.0 * m)).exp();
    let gap = (est.p_hat - target).abs();
    let tol = (cfg.sigmas * est.std_err).max(cfg.abs_floor);
    let alt = (-(d - 1.0).powi(3) / (2.0 * d * m)).exp();
    let detail = format!(
        "P_hat = {:.5} +- {:.5} over {} samples, target exp(-d^2/2m) = {target:.5}; exp(-(d-1)^3/(2dm)) = {alt:.5}",
        est.p_hat, est.std_err, est.samples
    );
    finish(5, NAME, start, Some(cfg.time_limit_secs), gap <= tol, gap, tol, detail)
}

/// Criterion 6: `lower <= partial_sum <= upper` on random admissible inputs
/// and on the exponential series `A = 1`, `B = 0`.
pub fn sum_lemma(cfg: &SumLemma, seed: u64) -> CriterionResult {
    const NAME: &str = "sum_lemma_bracketing";
    let start = Instant::now();
    let mut g = RngStream::new(seed, 6).rng();
    let mut inputs: Vec<SumLemmaInput> = (0..cfg.random_inputs).map(|_| random_sum_lemma_input(&mut g)).collect();
    inputs.push(SumLemmaInput { big_m: 20, a: vec![1.0; 20], b: vec![0.0; 20], c_hat: 0.05 });
    let mut failures = Vec::new();
    for (i, inp) in inputs.iter().enumerate() {
        if let Err(e) = sum_lemma_bounds(inp) {
            failures.push(format!("input {i}: {e}"));
        }
    }
    let detail = if failures.is_empty() { format!("{} inputs bracketed", inputs.len()) } else { failures.join("; ") };
    finish(6, NAME, start, None, failures.is_empty(), failures.len() as f64, 0.0, detail)
}

/// Criterion 7: the full analytic suite on a grid, plus the pseudovariance
/// combination at one large point.
pub fn dense_identities(cfg: &DenseIdentities, seed: u64) -> CriterionResult {
    const NAME: &str = "dense_machinery_identities";
    let start = Instant::now();
    let mut points = Vec::new();
    for &r in &cfg.r {
        for &m in &cfg.m {
            for l in &cfg.lambda {
                points.push((r, m, l.clone()));
            }
        }
    }
    let results: Vec<Result<(usize, Vec<String>)>> = points
        .par_iter()
        .map(|(r, m, l)| {
            let p = DenseParams::parse(*r, *m, l)?;
            let rep = run_suite(&p, Suite::All, seed)?;
            let bad = rep.clauses.iter().filter(|c| !c.passed).map(|c| format!("{p} {}", c.name)).collect();
            Ok((rep.clauses.len(), bad))
        })
        .collect();
    let mut clauses = 0usize;
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok((n, bad)) => {
                clauses += n;
                failures.extend(bad);
            }
            Err(e) => return errored(7, NAME, start, &e),
        }
    }
    let (cr, cm, cl) = &cfg.combo_point;
    let combo = match DenseParams::parse(*cr, *cm, cl).and_then(|p| gaussian_moments(&p)) {
        Ok(c) => c,
        Err(e) => return errored(7, NAME, start, &e),
    };
    let combo_tol = cfg.combo_constant / (f64::from(*cr) * f64::from(*cm));
    if combo.combo_gap.is_nan() || combo.combo_gap > combo_tol {
        failures.push(format!("pseudovariance combination gap {:.3e} > {combo_tol:.3e}", combo.combo_gap));
    }
    let detail = format!(
        "{} grid points, {clauses} clauses, {} failures{}; combo gap {:.3e} at ({cr},{cm},{cl})",
        points.len(),
        failures.len(),
        if failures.is_empty() { String::new() } else { format!(" [{}]", failures.join(", ")) },
        combo.combo_gap
    );
    finish(7, NAME, start, Some(cfg.time_limit_secs), failures.is_empty(), combo.combo_gap, combo_tol, detail)
}

/// Criterion 8: `|log H - log H_hat|` strictly decreasing in `m` and below
/// `final_gap` at the last `m`.
pub fn theorem_trend(cfg: &TheoremTrend) -> CriterionResult {
    const NAME: &str = "theorem_trend";
    let start = Instant::now();
    let budget = Budget::default();
    let mut gaps = Vec::new();
    for &m in &cfg.m {
        let run = || -> Result<f64> {
            let p = make_params(cfg.r, m, cfg.d)?;
            let h = if cfg.r == 3 { count_slab_dp(&p, &budget)? } else { count_bruteforce(&p, &budget)? };
            Ok((h.ln() - log_naive_estimate(&p).ln()).abs())
        };
        match run() {
            Ok(g) => gaps.push(g),
            Err(e) => return errored(8, NAME, start, &e),
        }
    }
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    let last = gaps.last().copied().unwrap_or(f64::NAN);
    let listed: Vec<String> = cfg.m.iter().zip(&gaps).map(|(m, g)| format!("m={m}: {g:.4}")).collect();
    let detail = format!("gaps {}; strictly decreasing: {decreasing}", listed.join(", "));
    finish(8, NAME, start, Some(cfg.time_limit_secs), decreasing && last < cfg.final_gap, last, cfg.final_gap, detail)
}

/// Criterion 9: dense formula close to the independence estimate, and the
/// Stirling expansion close to an exact binomial.
pub fn stirling_dense(cfg: &StirlingDense) -> CriterionResult {
    const NAME: &str = "stirling_dense_consistency";
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (r, m, l) in &cfg.points {
        let run = || -> Result<f64> {
            let dp = DenseParams::parse(*r, *m, l)?;
            let d = dp.integral_d().ok_or_else(|| Error::domain(format!("lambda m^(r-1) is not integral at {dp}")))?;
            let p = make_params(*r, *m, d)?;
            Ok((log_dense_estimate(&p)?.ln() - log_naive_estimate(&p).ln()).abs())
        };
        match run() {
            Ok(g) => {
                worst = worst.max(g);
                parts.push(format!("({r},{m},{l}) gap {g:.5}"));
            }
            Err(e) => return errored(9, NAME, start, &e),
        }
    }
    let n = cfg.stirling_n;
    let stirling = match stirling_binomial_log(n, 0.5) {
        Ok(v) => v.ln(),
        Err(e) => return errored(9, NAME, start, &e),
    };
    let st_rel = (stirling - ln_binomial(n, n / 2)).exp_m1().abs();
    parts.push(format!("Stirling C({n},{}) relative error {st_rel:.2e} (tolerance {:e})", n / 2, cfg.stirling_tol));
    let passed = worst < cfg.dense_tol && st_rel <= cfg.stirling_tol;
    finish(9, NAME, start, None, passed, worst, cfg.dense_tol, parts.join(", "))
}

/// Criterion 10: chi-square goodness of fit of rejection samples against the
/// uniform distribution on the exact list of graphs.
pub fn sampler_uniformity(cfg: &SamplerUniformity, seed: u64) -> CriterionResult {
    const NAME: &str = "sampler_uniformity";
    let start = Instant::now();
    let run = || -> Result<(f64, f64, usize)> {
        let p = make_params(cfg.r, cfg.m, cfg.d)?;
        let graphs = list_regular(&p, &Budget::default())?;
        if graphs.len() < 2 {
            return Err(Error::domain("need at least two graphs for a goodness-of-fit test"));
        }
        let index: HashMap<Vec<u64>, usize> = graphs.iter().enumerate().map(|(i, g)| (g.cell_indices(), i)).collect();
        let mut counts = vec![0u64; graphs.len()];
        for (g, _) in rejection_samples(&p, cfg.samples, cfg.max_tries, RngStream::new(seed, 10))? {
            let i = index.get(&g.cell_indices()).ok_or_else(|| Error::check("sample is not in the exact list"))?;
            counts[*i] += 1;
        }
        let expected = cfg.samples as f64 / graphs.len() as f64;
        let stat = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum::<f64>();
        let dof = (graphs.len() - 1) as f64;
        let chi = ChiSquared::new(dof).map_err(|e| Error::domain(e.to_string()))?;
        Ok((stat, chi.inverse_cdf(1.0 - cfg.significance), graphs.len()))
    };
    match run() {
        Ok((stat, crit, k)) => finish(
            10,
            NAME,
            start,
            None,
            stat <= crit,
            stat,
            crit,
            format!("chi-square over {k} graphs, {} dof, critical value at {}", k - 1, cfg.significance),
        ),
        Err(e) => errored(10, NAME, start, &e),
    }
}

/// Run criterion `id` from a configuration, if present.
pub fn run_criterion(cfg: &AcceptanceConfig, id: u32) -> Option<CriterionResult> {
    let seed = cfg.seed();
    match id {
        1 => cfg.exact_agreement.as_ref().map(exact_agreement),
        2 => cfg.cauchy_integral.as_ref().map(cauchy_integral),
        3 => cfg.h_simple.as_ref().map(h_simple),
        4 => cfg.double_counting.as_ref().map(double_counting),
        5 => cfg.sparse_probability.as_ref().map(|c| sparse_probability(c, seed)),
        6 => cfg.sum_lemma.as_ref().map(|c| sum_lemma(c, seed)),
        7 => cfg.dense_identities.as_ref().map(|c| dense_identities(c, seed)),
        8 => cfg.theorem_trend.as_ref().map(theorem_trend),
        9 => cfg.stirling_dense.as_ref().map(stirling_dense),
        10 => cfg.sampler_uniformity.as_ref().map(|c| sampler_uniformity(c, seed)),
        _ => None,
    }
}

/// All criteria of a run.
#[derive(Clone, Debug, Serialize)]
pub struct AcceptanceReport {
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
    pub warnings: Vec<String>,
}

impl AcceptanceReport {
    pub fn failed_names(&self) -> Vec<&'static str> {
        self.criteria.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }
}

/// Run every criterion present in `cfg`, in id order.
pub fn run_acceptance(cfg: &AcceptanceConfig) -> AcceptanceReport {
    let mut warnings = Vec::new();
    if cfg.is_empty() {
        warnings.push("experiment file lists no criteria; nothing to do".to_string());
    }
    let criteria: Vec<CriterionResult> = cfg.enabled().into_iter().filter_map(|id| run_criterion(cfg, id)).collect();
    AcceptanceReport { seed: cfg.seed(), passed: criteria.iter().all(|c| c.passed), criteria, warnings }
}
