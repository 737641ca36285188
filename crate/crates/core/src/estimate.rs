//! Closed-form estimates of H_r(d,m) in log space.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Pow;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{self, Budget, Method};
use crate::hypergraph::Params;
use crate::numeric::{binomial_big, ln_binomial, ln_factorial, xlogx, LogReal};

/// log of the independence estimate
/// `C(m^(r-1), d)^(r m) / C(m^r, m d)^(r-1)`.
pub fn log_naive_estimate(p: &Params) -> LogReal {
    let per = p.cells_per_vertex();
    let v = f64::from(p.r * p.m) * ln_binomial(per, p.d) - f64::from(p.r - 1) * ln_binomial(p.cells(), p.edges());
    LogReal::from_log(v)
}

/// Largest `m^r` for which [`naive_estimate_exact`] runs.
pub const EXACT_NAIVE_MAX_CELLS: u64 = 64;

/// The independence estimate as an exact rational, for `m^r <= 64`.
pub fn naive_estimate_exact(p: &Params) -> Option<BigRational> {
    if p.cells() > EXACT_NAIVE_MAX_CELLS {
        return None;
    }
    let num = BigInt::from(binomial_big(p.cells_per_vertex(), p.d)).pow(p.r * p.m);
    let den = BigInt::from(binomial_big(p.cells(), p.edges())).pow(p.r - 1);
    Some(BigRational::new(num, den))
}

/// Bipartite asymptotic `log(e^-1 * estimate)`, for `r = 2`, `0 < d < m`.
pub fn log_bipartite_estimate(p: &Params) -> Result<LogReal> {
    if p.r != 2 {
        return Err(Error::domain("bipartite estimate needs r = 2"));
    }
    if p.d == 0 || p.d == u64::from(p.m) {
        return Err(Error::domain("bipartite estimate needs 0 < d < m"));
    }
    Ok(LogReal::from_log(log_naive_estimate(p).ln() - 1.0))
}

/// Sparse r = 3 formula `((md)!)^2 / (d!)^(3m) * exp(-d^2 / 2m)`, in logs.
pub fn log_sparse3_estimate(p: &Params) -> Result<LogReal> {
    if p.r != 3 {
        return Err(Error::UnsupportedArity(p.r));
    }
    let m = f64::from(p.m);
    let d = p.d as f64;
    Ok(LogReal::from_log(2.0 * ln_factorial(p.edges()) - 3.0 * m * ln_factorial(p.d) - d * d / (2.0 * m)))
}

/// Dense closed form at arbitrary density `lambda` in (0, 1).
pub fn log_dense_formula(r: u32, m: u32, lambda: f64) -> Result<f64> {
    let big = lambda * (1.0 - lambda);
    if big.is_nan() || big <= 0.0 {
        return Err(Error::domain("dense formula needs 0 < lambda < 1"));
    }
    let (rf, mf) = (f64::from(r), f64::from(m));
    let n = rf * mf;
    Ok(-mf.powi(r as i32) * (xlogx(lambda) + xlogx(1.0 - lambda)) + (rf - n - 1.0) / 2.0 * (2.0 * PI * big).ln()
        - rf * (rf - 1.0) * (mf - 1.0) / 2.0 * mf.ln()
        - rf / (12.0 * big * mf.powi(r as i32 - 2)))
}

/// Dense-regime closed form for log H_r(d,m).
pub fn log_dense_estimate(p: &Params) -> Result<LogReal> {
    log_dense_formula(p.r, p.m, p.lambda()).map(LogReal::from_log)
}

/// Stirling expansion of `log C(N, lambda N)` through the `1/N` term.
/// The error is `O(Lambda^-3 N^-3)`.
pub fn stirling_binomial_log(n: u64, lam: f64) -> Result<LogReal> {
    if !(lam > 0.0 && lam < 1.0) {
        return Err(Error::domain("Stirling expansion needs 0 < lambda < 1"));
    }
    let k = lam * n as f64;
    if (k - k.round()).abs() > 1e-9 * k.max(1.0) {
        return Err(Error::domain("lambda * N must be an integer"));
    }
    let nf = n as f64;
    let big = lam * (1.0 - lam);
    Ok(LogReal::from_log(
        -nf * (xlogx(lam) + xlogx(1.0 - lam)) - 0.5 * (2.0 * PI * nf * big).ln() - (1.0 - big) / (12.0 * big * nf),
    ))
}

/// Which formulas an [`EstimateReport`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    Naive,
    Dense,
    Sparse3,
    Bipartite,
    All,
}

/// Every applicable estimate for one instance, with pairwise log-differences.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateReport {
    pub params: Params,
    pub log_naive: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_dense: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_sparse3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_bipartite: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_method: Option<&'static str>,
    /// `log_x - log_naive` for every populated estimate `x`.
    pub ratios: BTreeMap<String, f64>,
    /// Regime notes; values outside a formula's regime are still reported.
    pub notes: Vec<String>,
}

/// Evaluate the selected formulas; `exact_budget` adds an exact count when
/// one fits.
pub fn estimate_report(p: &Params, formula: Formula, exact_budget: Option<&Budget>) -> EstimateReport {
    let want = |f: Formula| formula == Formula::All || formula == f;
    let mut notes = Vec::new();
    let log_naive = log_naive_estimate(p).ln();
    let log_dense = if want(Formula::Dense) {
        let v = log_dense_estimate(p).ok().map(|l| l.ln());
        if v.is_none() && formula == Formula::Dense {
            notes.push("dense: undefined at lambda in {0, 1}".into());
        } else if v.is_some() && p.big_lambda() * f64::from(p.m).powi(p.r as i32 - 2) < f64::from(p.r).powi(2) {
            notes.push("dense: Lambda m^(r-2) is small; outside the dense regime".into());
        }
        v
    } else {
        None
    };
    let log_sparse3 = if want(Formula::Sparse3) {
        let v = log_sparse3_estimate(p).ok().map(|l| l.ln());
        if v.is_some() && (p.d as f64) * (p.d as f64) > f64::from(p.m) {
            notes.push("sparse3: d > sqrt(m); outside the sparse regime".into());
        }
        v
    } else {
        None
    };
    let log_bipartite = if want(Formula::Bipartite) { log_bipartite_estimate(p).ok().map(|l| l.ln()) } else { None };
    let (log_exact, exact_method) = match exact_budget.map(|b| exact::count(p, Method::Auto, b)) {
        Some(Ok(c)) => (Some(c.count_log), Some(c.method)),
        Some(Err(e)) => {
            notes.push(format!("exact: {e}"));
            (None, None)
        }
        None => (None, None),
    };
    let mut ratios = BTreeMap::new();
    for (name, v) in
        [("dense", log_dense), ("sparse3", log_sparse3), ("bipartite", log_bipartite), ("exact", log_exact)]
    {
        if let Some(v) = v {
            ratios.insert(format!("{name}_minus_naive"), v - log_naive);
        }
    }
    EstimateReport {
        params: *p,
        log_naive,
        log_dense,
        log_sparse3,
        log_bipartite,
        log_exact,
        exact_method,
        ratios,
        notes,
    }
}

/// One row of a degree sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub d: u64,
    pub log_naive: f64,
    pub log_dense: Option<f64>,
    pub log_exact: Option<f64>,
    /// `H / estimate` when an exact count is available.
    pub ratio: Option<f64>,
}

/// Column order of the sweep CSV.
pub const SWEEP_COLUMNS: [&str; 5] = ["d", "log_naive", "log_dense", "log_exact", "ratio"];

pub fn sweep(r: u32, m: u32, d_from: u64, d_to: u64, budget: Option<&Budget>) -> Result<Vec<SweepRow>> {
    (d_from..=d_to)
        .map(|d| {
            let p = Params::new(r, m, d)?;
            let log_naive = log_naive_estimate(&p).ln();
            let log_exact = budget.and_then(|b| exact::count(&p, Method::Auto, b).ok().map(|c| c.count_log));
            Ok(SweepRow {
                d,
                log_naive,
                log_dense: log_dense_estimate(&p).ok().map(|l| l.ln()),
                log_exact,
                ratio: log_exact.map(|e| (e - log_naive).exp()),
            })
        })
        .collect()
}
