//! C ABI for `hypercount`.
//!
//! Every function returns an [`HcStatus`]; results go through out-pointers.
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `*_free`. Strings returned through `char **` are heap-allocated
//! and released with [`hc_string_free`]. After a non-OK status,
//! [`hc_last_error_message`] describes the failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hypercount::analytic::{run_suite, DenseParams, Suite};
use hypercount::configmodel::{rejection_samples, simplicity_probability};
use hypercount::estimate::{estimate_report, Formula};
use hypercount::exact::{count, Budget, Method};
use hypercount::{make_multigraph_params, make_params, Error, Hypergraph, Params, RngStream};

/// Stream id shared with the CLI `sample` command, so equal seeds give equal samples.
const SAMPLE_STREAM: u64 = 0x7361_6d70;
/// Stream id shared with the CLI `psimple` command.
const PSIMPLE_STREAM: u64 = 0x7073_696d;

/// Result codes. The error values match the CLI exit codes where they overlap.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HcStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Parameters outside the valid domain, or malformed input.
    Domain = 2,
    /// The work budget or retry limit was exceeded.
    Budget = 3,
    /// A verification clause failed or a computation was unstable.
    Check = 4,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 5,
    /// An internal panic was caught at the boundary.
    Panic = 6,
}

/// Counting route, mirroring the CLI `--method` values.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HcMethod {
    Auto = 0,
    Brute = 1,
    Dp = 2,
    Dft = 3,
    Integral = 4,
}

/// Verification suite, mirroring the CLI `--suite` values.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HcSuite {
    All = 0,
    Linear = 1,
    Det = 2,
    Moments = 3,
    Taylor = 4,
    Symmetry = 5,
}

/// Opaque instance parameters `(r, m, d)`.
pub struct HcParams {
    inner: Params,
}

/// Opaque d-regular r-partite hypergraph.
pub struct HcHypergraph {
    inner: Hypergraph,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> HcStatus {
    match err.exit_code() {
        3 => HcStatus::Budget,
        4 => HcStatus::Check,
        _ => HcStatus::Domain,
    }
}

fn fail(status: HcStatus, msg: impl Into<String>) -> HcStatus {
    set_error(msg);
    status
}

/// Run `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), HcStatus>) -> HcStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HcStatus::Ok,
        Ok(Err(s)) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            fail(HcStatus::Panic, format!("panic: {msg}"))
        }
    }
}

fn lift<T>(r: hypercount::Result<T>) -> Result<T, HcStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), HcStatus> {
    if p.is_null() {
        Err(fail(HcStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn params_ref<'a>(p: *const HcParams) -> Result<&'a Params, HcStatus> {
    non_null(p, "params")?;
    Ok(&(*p).inner)
}

/// Parameters for routines that need `d <= m^(r-1)`.
unsafe fn regular_ref<'a>(p: *const HcParams) -> Result<&'a Params, HcStatus> {
    let params = params_ref(p)?;
    lift(make_params(params.r, params.m, params.d))?;
    Ok(params)
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, HcStatus> {
    non_null(s, what)?;
    CStr::from_ptr(s).to_str().map_err(|_| fail(HcStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

/// Write an owned C string to `out`.
unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), HcStatus> {
    non_null(out, "output string pointer")?;
    let c = CString::new(s).map_err(|_| fail(HcStatus::Domain, "string contains a NUL byte"))?;
    *out = c.into_raw();
    Ok(())
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, HcStatus> {
    serde_json::to_string(v).map_err(|e| fail(HcStatus::Domain, format!("serialization failed: {e}")))
}

fn budget_of(limit: u64) -> Budget {
    if limit == 0 {
        Budget::from_env()
    } else {
        Budget::uniform(u128::from(limit))
    }
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next `hc_*` call on the same thread.
#[no_mangle]
pub extern "C" fn hc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a pointer produced by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Validate `(r, m, d)` with `r >= 2`, `m >= 1`, `d <= m^(r-1)`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn hc_params_new(r: u32, m: u32, d: u64, out: *mut *mut HcParams) -> HcStatus {
    guard(|| {
        non_null(out, "out")?;
        let inner = lift(make_params(r, m, d))?;
        *out = Box::into_raw(Box::new(HcParams { inner }));
        Ok(())
    })
}

/// Like [`hc_params_new`] but allows `d > m^(r-1)`; only the simplicity
/// probability accepts such parameters.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn hc_params_new_multigraph(r: u32, m: u32, d: u64, out: *mut *mut HcParams) -> HcStatus {
    guard(|| {
        non_null(out, "out")?;
        let inner = lift(make_multigraph_params(r, m, d))?;
        *out = Box::into_raw(Box::new(HcParams { inner }));
        Ok(())
    })
}

/// Release parameters. Null is ignored.
///
/// # Safety
/// `p` must be null or a handle from `hc_params_new*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hc_params_free(p: *mut HcParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Count d-regular instances. `budget` of 0 uses the default (or
/// `HYPERCOUNT_BUDGET`). `out_exact` receives the decimal count, or null for
/// the quadrature route; it may itself be null if only the log is wanted.
///
/// # Safety
/// `p` must be a live handle; `out_log` must be writable; `out_exact` null or writable.
#[no_mangle]
pub unsafe extern "C" fn hc_count(
    p: *const HcParams,
    method: HcMethod,
    budget: u64,
    out_log: *mut f64,
    out_exact: *mut *mut c_char,
) -> HcStatus {
    guard(|| {
        let params = regular_ref(p)?;
        non_null(out_log, "out_log")?;
        let method = match method {
            HcMethod::Auto => Method::Auto,
            HcMethod::Brute => Method::Brute,
            HcMethod::Dp => Method::Dp,
            HcMethod::Dft => Method::Dft,
            HcMethod::Integral => Method::Integral,
        };
        let res = lift(count(params, method, &budget_of(budget)))?;
        *out_log = res.count_log;
        if !out_exact.is_null() {
            *out_exact = ptr::null_mut();
            if let Some(c) = res.count_exact {
                write_string(out_exact, c.to_string())?;
            }
        }
        Ok(())
    })
}

/// Natural log of the naive estimate.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hc_log_naive(p: *const HcParams, out: *mut f64) -> HcStatus {
    guard(|| {
        let params = regular_ref(p)?;
        non_null(out, "out")?;
        *out = estimate_report(params, Formula::Naive, None).log_naive;
        Ok(())
    })
}

/// Natural log of the dense-regime estimate; domain error when it does not
/// apply (`d = 0` or `d = m^(r-1)`).
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hc_log_dense(p: *const HcParams, out: *mut f64) -> HcStatus {
    guard(|| {
        let params = regular_ref(p)?;
        non_null(out, "out")?;
        match estimate_report(params, Formula::Dense, None).log_dense {
            Some(v) => {
                *out = v;
                Ok(())
            }
            None => Err(fail(HcStatus::Domain, "dense estimate needs 0 < d < m^(r-1)")),
        }
    })
}

/// Every applicable estimate, plus the exact count when it fits `budget`
/// (0 for the default), as a JSON object.
///
/// # Safety
/// `p` must be a live handle and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn hc_estimate_json(p: *const HcParams, budget: u64, out_json: *mut *mut c_char) -> HcStatus {
    guard(|| {
        let params = regular_ref(p)?;
        let report = estimate_report(params, Formula::All, Some(&budget_of(budget)));
        write_string(out_json, to_json(&report)?)
    })
}

/// Probability that a uniform configuration is simple: exact when the
/// configuration space is small, otherwise Monte Carlo with `samples` draws.
/// `out_std_err` is 0 for exact results.
///
/// # Safety
/// `p` must be a live handle; the out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_simplicity_probability(
    p: *const HcParams,
    samples: u64,
    seed: u64,
    out_p: *mut f64,
    out_std_err: *mut f64,
) -> HcStatus {
    guard(|| {
        let params = params_ref(p)?;
        non_null(out_p, "out_p")?;
        non_null(out_std_err, "out_std_err")?;
        let est = simplicity_probability(params, samples, RngStream::new(seed, PSIMPLE_STREAM));
        *out_p = est.p_hat;
        *out_std_err = est.std_err;
        Ok(())
    })
}

/// Draw a uniform d-regular instance by configuration-model rejection.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hc_sample(
    p: *const HcParams,
    seed: u64,
    max_tries: u64,
    out: *mut *mut HcHypergraph,
) -> HcStatus {
    guard(|| {
        let params = regular_ref(p)?;
        non_null(out, "out")?;
        let mut drawn = lift(rejection_samples(params, 1, max_tries, RngStream::new(seed, SAMPLE_STREAM)))?;
        let (inner, _) = drawn.pop().ok_or_else(|| fail(HcStatus::Check, "sampler returned nothing"))?;
        *out = Box::into_raw(Box::new(HcHypergraph { inner }));
        Ok(())
    })
}

/// Number of edges of `g`.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hc_hypergraph_num_edges(g: *const HcHypergraph, out: *mut usize) -> HcStatus {
    guard(|| {
        non_null(g, "hypergraph")?;
        non_null(out, "out")?;
        *out = (*g).inner.len();
        Ok(())
    })
}

/// 1-based coordinates of edge `index` written to `coords`, which must hold
/// `len >= r` entries.
///
/// # Safety
/// `g` must be a live handle and `coords` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn hc_hypergraph_edge(
    g: *const HcHypergraph,
    index: usize,
    coords: *mut u32,
    len: usize,
) -> HcStatus {
    guard(|| {
        non_null(g, "hypergraph")?;
        non_null(coords, "coords")?;
        let edges = (*g).inner.edges();
        let edge = edges
            .get(index)
            .ok_or_else(|| fail(HcStatus::Domain, format!("edge index {index} out of range 0..{}", edges.len())))?;
        let one_based = edge.one_based();
        if len < one_based.len() {
            return Err(fail(HcStatus::Domain, format!("coords holds {len} entries, need {}", one_based.len())));
        }
        std::slice::from_raw_parts_mut(coords, one_based.len()).copy_from_slice(&one_based);
        Ok(())
    })
}

/// `g` as `{"r","m","d","edges"}` JSON with 1-based coordinates.
///
/// # Safety
/// `g` must be a live handle and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn hc_hypergraph_to_json(g: *const HcHypergraph, out_json: *mut *mut c_char) -> HcStatus {
    guard(|| {
        non_null(g, "hypergraph")?;
        write_string(out_json, to_json(&(*g).inner.to_json())?)
    })
}

/// Release a hypergraph. Null is ignored.
///
/// # Safety
/// `g` must be null or a handle from [`hc_sample`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hc_hypergraph_free(g: *mut HcHypergraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Run a verification suite at density `lambda` (`"p/q"`, integer or
/// decimal). A completed run returns OK even when clauses fail: check
/// `out_passed`. `out_json` may be null.
///
/// # Safety
/// `lambda` must be a NUL-terminated string; `out_passed` writable;
/// `out_json` null or writable.
#[no_mangle]
pub unsafe extern "C" fn hc_verify(
    r: u32,
    m: u32,
    lambda: *const c_char,
    suite: HcSuite,
    seed: u64,
    out_passed: *mut bool,
    out_json: *mut *mut c_char,
) -> HcStatus {
    guard(|| {
        let lambda = read_str(lambda, "lambda")?;
        non_null(out_passed, "out_passed")?;
        let suite = match suite {
            HcSuite::All => Suite::All,
            HcSuite::Linear => Suite::Linear,
            HcSuite::Det => Suite::Det,
            HcSuite::Moments => Suite::Moments,
            HcSuite::Taylor => Suite::Taylor,
            HcSuite::Symmetry => Suite::Symmetry,
        };
        let params = lift(DenseParams::parse(r, m, lambda))?;
        let report = lift(run_suite(&params, suite, seed))?;
        *out_passed = report.passed;
        if !out_json.is_null() {
            write_string(out_json, to_json(&report)?)?;
        }
        Ok(())
    })
}
