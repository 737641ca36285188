//! Named pass/fail checks of the dense-regime identities.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use serde::Serialize;

use super::matrix::{
    build_matrices, dense_inf_norm, dense_log_abs_det, dense_one_norm, dense_rank, kernel_vectors, max_abs,
    max_abs_diff, StructuredMatrix,
};
use super::moments::{
    brute_isserlis_check, covariance_matrix, edge_covariance_residual, explicit_covariance, gaussian_moments,
    require_dense, ISSERLIS_MAX_CELLS, PAIR_LIMIT,
};
use super::{
    apply_phi, circular_norm, eval_f, factor_bound_holds, random_box_point, shift_classes, taylor_box,
    taylor_coeff_residual, taylor_residual_ratio, DenseParams,
};
use crate::error::{Error, Result};
use crate::numeric::{xlogx, LogReal};
use crate::rng::RngStream;

/// Tolerance for pure algebra.
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Tolerance for eigenvalues and determinants.
pub const SPECTRAL_TOL: f64 = 1e-9;
/// Tolerance for the symmetry of `F` and for matrix identities after inversion.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// One named check with its measured residual.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Clause {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Clause {
    /// Passes when `residual <= tolerance`; NaN fails.
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Clause { name: name.into(), passed: residual <= tolerance, residual, tolerance, detail: None }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// Error naming the first failed clause, if any.
pub fn require_all(clauses: Vec<Clause>) -> Result<Vec<Clause>> {
    if let Some(c) = clauses.iter().find(|c| !c.passed) {
        return Err(Error::check(format!("{}: residual {:e} exceeds tolerance {:e}", c.name, c.residual, c.tolerance)));
    }
    Ok(clauses)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn rel_matrix(x: &DMatrix<f64>, expected: &DMatrix<f64>) -> f64 {
    max_abs_diff(x, expected) / max_abs(expected).max(f64::MIN_POSITIVE)
}

fn linear_clauses(p: &DenseParams) -> Result<Vec<Clause>> {
    require_dense(p)?;
    let mats = build_matrices(p)?;
    let n = p.n();
    let (rf, mf) = (f64::from(p.r), f64::from(p.m));
    let scale = p.big_lambda() * mf.powi(p.r as i32 - 1);
    let a = mats.a.to_dense();
    let w = mats.w.to_dense();
    let t = mats.t.to_dense();
    let s = &a + w.transpose() * &w;
    let mut out = Vec::new();

    let sym = mats.a_plus_wtw().to_dense();
    out.push(Clause::new("structured.a_plus_wtw", rel_matrix(&sym, &s), ALGEBRA_TOL));
    let closed = StructuredMatrix::new(p.r, p.m, scale / 2.0, scale * (rf - 1.0) / (2.0 * mf), 0.0).to_dense();
    out.push(Clause::new("structured.a_plus_wtw_closed_form", rel_matrix(&s, &closed), ALGEBRA_TOL));

    // (a) spectrum
    let mut eig: Vec<f64> = SymmetricEigen::new(s.clone()).eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    let mut expected = vec![scale / 2.0; n - p.r as usize];
    expected.extend(std::iter::repeat(scale * rf / 2.0).take(p.r as usize));
    expected.sort_by(f64::total_cmp);
    let top = expected.iter().fold(0.0f64, |a, &v| a.max(v));
    let spec = eig.iter().zip(&expected).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / top;
    out.push(Clause::new("linear.a.spectrum", spec, SPECTRAL_TOL));

    // (b) determinant
    let formula = n as f64 * (scale / 2.0).ln() + rf * rf.ln();
    let logdet = dense_log_abs_det(&s);
    out.push(
        Clause::new("linear.b.determinant", (logdet - formula).abs() / formula.abs().max(1.0), SPECTRAL_TOL)
            .with_detail(format!("log det = {logdet}, formula {formula}")),
    );

    // (c) whitening
    let tst = t.transpose() * &s * &t;
    out.push(Clause::new("linear.c.whitening", max_abs_diff(&tst, &DMatrix::identity(n, n)), SYMMETRY_TOL));

    // (d) inverse
    let inv = s.clone().try_inverse().ok_or_else(|| Error::NumericalInstability("A + W^T W is singular".into()))?;
    let inv_formula =
        StructuredMatrix::new(p.r, p.m, 2.0 / scale, -2.0 / scale * (rf - 1.0) / n as f64, 0.0).to_dense();
    out.push(Clause::new("linear.d.inverse", rel_matrix(&inv, &inv_formula), SYMMETRY_TOL));

    // (e) norms of T
    let (t_inf, t_one) = (dense_inf_norm(&t), dense_one_norm(&t));
    out.push(Clause::new("linear.e.norms_equal", rel(t_one, t_inf), ALGEBRA_TOL));
    let bound = 3.0 / scale.sqrt();
    out.push(
        Clause::new("linear.e.norm_bound", t_inf / bound, 1.0).with_detail(format!("|T|_inf = {t_inf}, bound {bound}")),
    );

    // (f) inverse of T
    let t_inv = t.try_inverse().ok_or_else(|| Error::NumericalInstability("T is singular".into()))?;
    let f_formula = (scale * rf / 2.0).sqrt();
    out.push(Clause::new("linear.f.inverse_norm", rel(dense_inf_norm(&t_inv), f_formula), SYMMETRY_TOL));
    Ok(out)
}

/// The six clauses on `A + W^T W` and `T`; fails naming the first bad clause.
pub fn verify_linear_lemma(p: &DenseParams) -> Result<Vec<Clause>> {
    require_all(linear_clauses(p)?)
}

fn qw_det_values(p: &DenseParams) -> Result<(f64, f64)> {
    require_dense(p)?;
    let mats = build_matrices(p)?;
    let w = mats.w.to_dense();
    let m = mats.q.transpose() * &mats.q + w.transpose() * &w;
    let rf = f64::from(p.r);
    let formula = rf * rf.ln() + (rf - 1.0) * (p.big_lambda() * p.cells_f64() / 2.0).ln();
    Ok((formula, dense_log_abs_det(&m)))
}

/// `(log r^r (Lambda m^r / 2)^(r-1), log |det(Q^T Q + W^T W)|)`, required to
/// agree to `1e-9` relative.
pub fn verify_qw_det(p: &DenseParams) -> Result<(LogReal, LogReal)> {
    let (formula, numeric) = qw_det_values(p)?;
    let gap = (numeric - formula).exp_m1().abs();
    if gap.is_nan() || gap > SPECTRAL_TOL {
        return Err(Error::check(format!("QW determinant: relative gap {gap:e}")));
    }
    Ok((LogReal::from_log(formula), LogReal::from_log(numeric)))
}

fn kernel_clauses(p: &DenseParams) -> Result<Vec<Clause>> {
    require_dense(p)?;
    let mats = build_matrices(p)?;
    let n = p.n();
    let a = mats.a.to_dense();
    let vs = kernel_vectors(p.r, p.m);
    let scale = max_abs(&a);
    let mut out = Vec::new();

    let av = vs.iter().map(|v| (&a * v).amax()).fold(0.0, f64::max) / scale;
    out.push(Clause::new("kernel.a_v_zero", av, ALGEBRA_TOL));

    let vmat = DMatrix::from_columns(&vs);
    let rank_v = if vs.is_empty() { 0 } else { dense_rank(&vmat, 1e-9) };
    out.push(
        Clause::new("kernel.v_independent", (rank_v as f64 - vs.len() as f64).abs(), 0.0)
            .with_detail(format!("rank {rank_v} of {} vectors", vs.len())),
    );
    let nullity = n - dense_rank(&a, 1e-9);
    out.push(
        Clause::new("kernel.nullity", (nullity as f64 - f64::from(p.r - 1)).abs(), 0.0)
            .with_detail(format!("nullity {nullity}, expected {}", p.r - 1)),
    );

    let q = &mats.q;
    let qv = vs.iter().map(|v| (q * v).amax()).fold(0.0, f64::max);
    out.push(Clause::new("kernel.q_v_zero", qv, ALGEBRA_TOL));
    let pinned: Vec<usize> = (2..=p.r as usize).map(|j| j * p.m as usize - 1).collect();
    let mut slice = 0.0f64;
    for l in (0..n).filter(|l| !pinned.contains(l)) {
        let e = DVector::from_fn(n, |i, _| if i == l { 1.0 } else { 0.0 });
        slice = slice.max((q * &e - e).amax());
    }
    out.push(Clause::new("kernel.q_identity_on_slice", slice, ALGEBRA_TOL));
    out.push(Clause::new("kernel.q_idempotent", max_abs_diff(&(q * q), q), ALGEBRA_TOL));

    let pq_rw = mats.p.to_dense() * q + mats.r.to_dense() * mats.w.to_dense();
    out.push(Clause::new("kernel.pq_plus_rw", max_abs_diff(&pq_rw, &DMatrix::identity(n, n)), ALGEBRA_TOL));
    Ok(out)
}

/// `A v_j = 0`, independence of the `v_j`, nullity `r - 1`, `Q v_j = 0`,
/// `Q` fixing the slice, `Q^2 = Q` and `P Q + R W = I`.
pub fn kernel_check(p: &DenseParams) -> Result<Vec<Clause>> {
    require_all(kernel_clauses(p)?)
}

/// Closed-form and reassembled dense log-count.
#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub params: DenseParams,
    /// `-m^r log(lambda^lambda (1-lambda)^(1-lambda)) + ((r-n-1)/2) log(2 pi Lambda)
    ///  - (r(r-1)(m-1)/2) log m - r / (12 Lambda m^(r-2))`.
    pub closed_log: f64,
    /// The same value composed from the two determinants, the `pi` factors
    /// and the Gaussian correction.
    pub reassembled_log: f64,
    /// Whether the determinants were computed densely (`n <= 200`) or
    /// symbolically.
    pub dense_determinants: bool,
    pub residual: f64,
    pub tolerance: f64,
}

pub fn dense_pipeline_report(p: &DenseParams) -> Result<PipelineReport> {
    p.require_nondegenerate()?;
    let lam = p.lam();
    let big = p.big_lambda();
    let (rf, mf) = (f64::from(p.r), f64::from(p.m));
    let n = p.n() as f64;
    let entropy = -p.cells_f64() * (xlogx(lam) + xlogx(1.0 - lam));
    let correction = -rf / (12.0 * big * mf.powi(p.r as i32 - 2));
    let closed = entropy + (rf - n - 1.0) / 2.0 * (2.0 * PI * big).ln() - rf * (rf - 1.0) * (mf - 1.0) / 2.0 * mf.ln()
        + correction;

    let dense = p.n() <= super::moments::DENSE_LIMIT;
    let (log_qw, log_aw) = if dense {
        let mats = build_matrices(p)?;
        let w = mats.w.to_dense();
        let wtw = w.transpose() * &w;
        let qw = mats.q.transpose() * &mats.q + &wtw;
        (dense_log_abs_det(&qw), dense_log_abs_det(&(mats.a.to_dense() + wtw)))
    } else {
        let mats = build_matrices(p)?;
        let formula = rf * rf.ln() + (rf - 1.0) * (big * p.cells_f64() / 2.0).ln();
        (formula, mats.a_plus_wtw().log_abs_det())
    };
    let reassembled = entropy - (n - rf + 1.0) * (2.0 * PI).ln() + 0.5 * log_qw - 0.5 * log_aw
        + (n - rf + 1.0) / 2.0 * PI.ln()
        + correction;
    let residual = (closed - reassembled).abs() / closed.abs().max(1.0);
    Ok(PipelineReport {
        params: p.clone(),
        closed_log: closed,
        reassembled_log: reassembled,
        dense_determinants: dense,
        residual,
        tolerance: SPECTRAL_TOL,
    })
}

/// Dense-regime log-count, after checking that the determinant lemmas
/// compose into the closed form.
pub fn dense_pipeline_log(p: &DenseParams) -> Result<LogReal> {
    let rep = dense_pipeline_report(p)?;
    if rep.residual.is_nan() || rep.residual > rep.tolerance {
        return Err(Error::check(format!("dense pipeline reassembly: residual {:e}", rep.residual)));
    }
    Ok(LogReal::from_log(rep.closed_log))
}

/// Groups of checks selectable from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Linear,
    Det,
    Moments,
    Taylor,
    Symmetry,
    All,
}

/// Clauses of one suite run plus the checks skipped for size.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub params: DenseParams,
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub clauses: Vec<Clause>,
    pub skipped: Vec<String>,
}

/// Samples of `F` per random check, scaled down for large `m^r`.
fn f_samples(p: &DenseParams, full: u64) -> u64 {
    let cells = p.cells_f64();
    ((2.0e7 / cells) as u64).clamp(10, full)
}

fn symmetry_clauses(p: &DenseParams, rng: RngStream) -> Result<Vec<Clause>> {
    let mut out = Vec::new();
    let n = p.n();
    let f0 = eval_f(&vec![0.0; n], p)?;
    out.push(Clause::new("symmetry.f_at_origin", (f0 - 1.0).norm(), 0.0));

    let mut g = rng.substream(0).rng();
    let mut worst = 0.0f64;
    for _ in 0..f_samples(p, 1000) {
        let theta: Vec<f64> = (0..n).map(|_| g.gen_range(-PI..PI)).collect();
        worst = worst.max(eval_f(&theta, p)?.norm());
    }
    out.push(Clause::new("symmetry.f_modulus_at_most_one", (worst - 1.0).max(0.0), 1e-14));

    // F is 2 pi-periodic only for integral d; otherwise test unwrapped shifts
    let periodic = p.integral_d().is_some();
    let mut g = rng.substream(1).rng();
    let mut worst = 0.0f64;
    for _ in 0..f_samples(p, 100) {
        let theta: Vec<f64> = (0..n).map(|_| g.gen_range(-PI..PI)).collect();
        let mut c: Vec<f64> = (0..p.r - 1).map(|_| g.gen_range(-PI..PI)).collect();
        let turns = if periodic { f64::from(g.gen_range(-2i32..=2)) } else { 0.0 };
        c.push(-c.iter().sum::<f64>() + 2.0 * PI * turns);
        let moved = if periodic { apply_phi(&theta, &c, p)? } else { shift_classes(&theta, &c, p)? };
        let a = eval_f(&theta, p)?;
        let b = eval_f(&moved, p)?;
        worst = worst.max((a - b).norm() / a.norm().max(f64::MIN_POSITIVE));
    }
    out.push(Clause::new("symmetry.f_invariant_under_phi", worst, SYMMETRY_TOL).with_detail(if periodic {
        "wrapped shifts"
    } else {
        "unwrapped shifts (d not integral)"
    }));

    let mut g = rng.substream(2).rng();
    let mut bad = 0u32;
    for _ in 0..10_000 {
        if !factor_bound_holds(g.gen_range(-10.0..=10.0), g.gen_range(0.0..=1.0)) {
            bad += 1;
        }
    }
    out.push(Clause::new("symmetry.factor_bound", f64::from(bad), 0.0).with_detail("10000 random (x, lambda)"));

    let mut g = rng.substream(3).rng();
    let mut excess = 0.0f64;
    for _ in 0..1000 {
        let (x, y) = (g.gen_range(-50.0..50.0), g.gen_range(-50.0..50.0));
        excess = excess.max(circular_norm(x + y) - circular_norm(x) - circular_norm(y));
    }
    out.push(Clause::new("symmetry.circular_norm_triangle", excess.max(0.0), ALGEBRA_TOL));
    Ok(out)
}

fn taylor_clauses(p: &DenseParams, rng: RngStream) -> Result<Vec<Clause>> {
    p.require_nondegenerate()?;
    let mut out = vec![Clause::new("taylor.coefficients", taylor_coeff_residual(p.lam())?, 1e-6)];
    let h = taylor_box(p);
    let mut g = rng.substream(4).rng();
    let mut worst = 0.0f64;
    for _ in 0..f_samples(p, 20) {
        let theta = random_box_point(p, h, &mut g);
        worst = worst.max(taylor_residual_ratio(&theta, p)?);
    }
    out.push(
        Clause::new("taylor.residual", worst, 1.0)
            .with_detail(format!("|theta|_inf <= {h:.3e}; residual / (10 Lambda m^r (r|theta|)^5)")),
    );
    Ok(out)
}

fn det_clauses(p: &DenseParams) -> Result<Vec<Clause>> {
    let (formula, numeric) = qw_det_values(p)?;
    let pipe = dense_pipeline_report(p)?;
    Ok(vec![
        Clause::new("det.qw_determinant", (numeric - formula).exp_m1().abs(), SPECTRAL_TOL)
            .with_detail(format!("formula {:.12e}", formula.exp())),
        Clause::new("det.pipeline_reassembly", pipe.residual, pipe.tolerance),
    ])
}

fn moment_clauses(p: &DenseParams, skipped: &mut Vec<String>) -> Result<Vec<Clause>> {
    let mut out = Vec::new();
    let rep = gaussian_moments(p)?;
    out.push(Clause::new("moments.e_f4_closed_form", if rep.e_f4_exact_match { 0.0 } else { 1.0 }, 0.0));
    out.push(Clause::new("moments.var_f3_closed_form", if rep.var_f3_exact_match { 0.0 } else { 1.0 }, 0.0));
    let negative = (-rep.var_f3).max(0.0) + (-rep.var_f4).max(0.0);
    out.push(Clause::new("moments.variances_nonnegative", negative, 0.0));

    if p.n() <= super::moments::DENSE_LIMIT {
        let c = covariance_matrix(p)?;
        let e = explicit_covariance(p)?;
        out.push(Clause::new("moments.covariance_entries", rel_matrix(&c, &e), ALGEBRA_TOL));
    } else {
        skipped.push("moments.covariance_entries (n > 200)".into());
    }
    match edge_covariance_residual(p) {
        Ok((_, worst)) => out.push(Clause::new("moments.edge_pair_covariance", worst, ALGEBRA_TOL)),
        Err(Error::BudgetExceeded { .. }) => {
            skipped.push(format!("moments.edge_pair_covariance (more than {PAIR_LIMIT} cell pairs)"))
        }
        Err(e) => return Err(e),
    }
    if p.cells_f64() <= ISSERLIS_MAX_CELLS as f64 {
        match brute_isserlis_check(p) {
            Ok(r) => out.push(Clause::new("moments.isserlis_brute", r.max_residual, r.tolerance)),
            Err(Error::CheckFailed(msg)) => {
                out.push(Clause::new("moments.isserlis_brute", f64::INFINITY, 1e-9).with_detail(msg))
            }
            Err(e) => return Err(e),
        }
    } else {
        skipped.push(format!("moments.isserlis_brute (m^r > {ISSERLIS_MAX_CELLS})"));
    }
    Ok(out)
}

/// Run one suite. Failed clauses are reported, not raised; only domain and
/// budget problems are errors.
pub fn run_suite(p: &DenseParams, suite: Suite, seed: u64) -> Result<SuiteReport> {
    p.require_nondegenerate()?;
    let rng = RngStream::new(seed, 0x616e_616c);
    let mut clauses = Vec::new();
    let mut skipped = Vec::new();
    let want = |s: Suite| suite == Suite::All || suite == s;
    let dense_ok = p.n() <= super::moments::DENSE_LIMIT;
    if want(Suite::Linear) {
        if dense_ok {
            clauses.extend(linear_clauses(p)?);
            clauses.extend(kernel_clauses(p)?);
        } else {
            skipped.push("linear and kernel clauses (n > 200)".into());
        }
    }
    if want(Suite::Det) {
        if dense_ok {
            clauses.extend(det_clauses(p)?);
        } else {
            let pipe = dense_pipeline_report(p)?;
            clauses.push(Clause::new("det.pipeline_reassembly_symbolic", pipe.residual, pipe.tolerance));
            skipped.push("det.qw_determinant (n > 200)".into());
        }
    }
    if want(Suite::Moments) {
        clauses.extend(moment_clauses(p, &mut skipped)?);
    }
    if want(Suite::Taylor) {
        clauses.extend(taylor_clauses(p, rng)?);
    }
    if want(Suite::Symmetry) {
        clauses.extend(symmetry_clauses(p, rng)?);
    }
    let passed = clauses.iter().all(|c| c.passed);
    Ok(SuiteReport { params: p.clone(), suite, seed, passed, clauses, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::log_dense_formula;
    use crate::numeric::big_rational;

    fn dp(r: u32, m: u32, num: i64, den: i64) -> DenseParams {
        DenseParams::new(r, m, big_rational(num, den)).unwrap()
    }

    #[test]
    fn spectrum_example() {
        let p = dp(3, 2, 1, 2);
        let s = build_matrices(&p).unwrap().a_plus_wtw();
        let eig = s.eigenvalues();
        assert_eq!((eig[0].1, eig[1].1, eig[2].1), (3, 2, 1));
        assert!((eig[0].0 - 0.5).abs() < 1e-15);
        assert!((eig[1].0 - 1.5).abs() < 1e-15 && (eig[2].0 - 1.5).abs() < 1e-15);
        assert!((s.det() - 0.421875).abs() < 1e-15);
        let clauses = verify_linear_lemma(&p).unwrap();
        assert!(clauses.iter().all(|c| c.passed));
    }

    #[test]
    fn linear_lemma_at_five_three() {
        let clauses = verify_linear_lemma(&dp(5, 3, 1, 3)).unwrap();
        assert!(clauses.iter().filter(|c| c.name.starts_with("linear.")).count() >= 7);
    }

    #[test]
    fn qw_determinant_examples() {
        let (f, num) = verify_qw_det(&dp(3, 2, 1, 2)).unwrap();
        assert!((f.to_f64() - 27.0).abs() < 1e-12);
        assert!((num.to_f64() - 27.0).abs() < 1e-9);
        verify_qw_det(&dp(3, 3, 1, 3)).unwrap();
        verify_qw_det(&dp(4, 2, 1, 2)).unwrap();
    }

    #[test]
    fn kernel_nullity() {
        for (r, m, num, den) in [(3, 2, 1, 2), (4, 3, 1, 4)] {
            let clauses = kernel_check(&dp(r, m, num, den)).unwrap();
            let nullity = clauses.iter().find(|c| c.name == "kernel.nullity").unwrap();
            assert_eq!(nullity.residual, 0.0);
        }
    }

    #[test]
    fn pipeline_matches_estimate_formula() {
        let v = dense_pipeline_log(&dp(3, 40, 1, 2)).unwrap().ln();
        let e = log_dense_formula(3, 40, 0.5).unwrap();
        assert!((v - e).abs() <= 1e-12 * e.abs());
    }

    #[test]
    fn pipeline_reassembly_small() {
        for (r, m) in [(3, 2), (4, 3)] {
            let rep = dense_pipeline_report(&dp(r, m, 1, 2)).unwrap();
            assert!(rep.dense_determinants);
            assert!(rep.residual <= 1e-9, "({r},{m}): {}", rep.residual);
        }
        let big = dense_pipeline_report(&dp(3, 100, 1, 2)).unwrap();
        assert!(!big.dense_determinants);
        assert!(big.residual <= 1e-9);
    }

    #[test]
    fn all_suite_at_three_two_half() {
        let rep = run_suite(&dp(3, 2, 1, 2), Suite::All, 1).unwrap();
        for c in &rep.clauses {
            assert!(c.passed, "{c:?}");
        }
        assert!(rep.passed);
        assert!(rep.skipped.is_empty());
    }

    #[test]
    fn non_integral_degree_uses_unwrapped_shifts() {
        let rep = run_suite(&dp(3, 2, 1, 10), Suite::Symmetry, 3).unwrap();
        assert!(rep.passed, "{:?}", rep.clauses);
    }

    #[test]
    fn failed_clause_is_named() {
        let err = require_all(vec![Clause::new("x.ok", 0.0, 1.0), Clause::new("x.bad", 2.0, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::CheckFailed(ref s) if s.contains("x.bad")));
    }

    #[test]
    fn suite_report_is_deterministic() {
        let a = serde_json::to_string(&run_suite(&dp(3, 3, 1, 3), Suite::Symmetry, 9).unwrap()).unwrap();
        let b = serde_json::to_string(&run_suite(&dp(3, 3, 1, 3), Suite::Symmetry, 9).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
