//! Gaussian moments of the cubic and quartic terms of `log F`.
//!
//! `X` has density proportional to `exp(-x^T (A + W^T W) x)`, so its
//! covariance is `(1/2)(A + W^T W)^{-1}`. For cells `e, e'` the covariance of
//! `X_e = sum_{j in e} X_j` depends only on `k = |e ∩ e'|` and equals
//! `varsigma(k) = (k - (r-1)/m) / (Lambda m^(r-1))`.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::matrix::build_matrices;
use super::DenseParams;
use crate::error::{Error, Result};
use crate::numeric::{binomial_big, rational_to_f64};

/// Largest `n` for dense eigen, determinant and inverse computations.
pub const DENSE_LIMIT: usize = 200;

/// Largest number of cell pairs walked by the matrix-entry checks.
pub const PAIR_LIMIT: u64 = 1_000_000;

/// Largest `m^r` accepted by [`brute_isserlis_check`].
pub const ISSERLIS_MAX_CELLS: u64 = 16;

pub(crate) fn require_dense(p: &DenseParams) -> Result<()> {
    if p.n() > DENSE_LIMIT {
        return Err(Error::BudgetExceeded {
            what: "dense dimension n",
            needed: p.n() as u128,
            budget: DENSE_LIMIT as u128,
        });
    }
    Ok(())
}

fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

/// `varsigma(k)` exactly.
pub fn varsigma_exact(p: &DenseParams, k: u32) -> Result<BigRational> {
    p.require_nondegenerate()?;
    if k > p.r {
        return Err(Error::domain(format!("k = {k} exceeds r = {}", p.r)));
    }
    let big = p.big_lambda_exact();
    let shift = BigRational::new(BigInt::from(p.r - 1), BigInt::from(p.m));
    Ok((int(k) - shift) / (big * int(BigInt::from(p.m).pow(p.r - 1))))
}

/// `varsigma(k) = Cov[X_e, X_e']` for `|e ∩ e'| = k`.
pub fn covariance_sigma(p: &DenseParams, k: u32) -> Result<f64> {
    varsigma_exact(p, k).map(|v| rational_to_f64(&v))
}

/// `(1/2)(A + W^T W)^{-1}` by dense inversion.
pub fn covariance_matrix(p: &DenseParams) -> Result<DMatrix<f64>> {
    require_dense(p)?;
    let s = build_matrices(p)?.a_plus_wtw().to_dense();
    let inv = s.try_inverse().ok_or_else(|| Error::NumericalInstability("A + W^T W is singular".into()))?;
    Ok(inv * 0.5)
}

/// The covariance entries in closed form: diagonal
/// `(1 - (r-1)/(r m)) / (Lambda m^(r-1))`, same class `-(r-1)/(Lambda r m^r)`,
/// zero across classes.
pub fn explicit_covariance(p: &DenseParams) -> Result<DMatrix<f64>> {
    p.require_nondegenerate()?;
    require_dense(p)?;
    let (r, m) = (f64::from(p.r), f64::from(p.m));
    let big = p.big_lambda();
    let diag = (1.0 - (r - 1.0) / (r * m)) / (big * m.powi(p.r as i32 - 1));
    let same = -(r - 1.0) / (big * r * m.powi(p.r as i32));
    let mu = p.m as usize;
    let n = p.n();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            diag
        } else if i / mu == j / mu {
            same
        } else {
            0.0
        }
    }))
}

/// Vertex indices of cell `idx` (row-major over classes).
fn cell_vertices(p: &DenseParams, mut idx: u64) -> Vec<usize> {
    let m = u64::from(p.m);
    let mut out = vec![0usize; p.r as usize];
    for t in (0..p.r as usize).rev() {
        out[t] = t * p.m as usize + (idx % m) as usize;
        idx /= m;
    }
    out
}

fn pair_cov(c: &DMatrix<f64>, e: &[usize], f: &[usize]) -> f64 {
    e.iter().map(|&i| f.iter().map(|&j| c[(i, j)]).sum::<f64>()).sum()
}

fn cells_u64(p: &DenseParams) -> Result<u64> {
    u64::from(p.m).checked_pow(p.r).ok_or_else(|| Error::domain("m^r overflows"))
}

/// Largest relative gap between `sigma(e, e')` summed from covariance matrix
/// entries and `varsigma(|e ∩ e'|)`, over all ordered cell pairs.
/// Returns `(pairs, max_residual)`.
pub fn edge_covariance_residual(p: &DenseParams) -> Result<(u64, f64)> {
    let cells = cells_u64(p)?;
    let pairs = cells.saturating_mul(cells);
    if pairs > PAIR_LIMIT {
        return Err(Error::BudgetExceeded {
            what: "cell pairs",
            needed: u128::from(pairs),
            budget: u128::from(PAIR_LIMIT),
        });
    }
    let c = covariance_matrix(p)?;
    let sig: Vec<f64> = (0..=p.r).map(|k| covariance_sigma(p, k)).collect::<Result<_>>()?;
    let scale = sig[p.r as usize].abs().max(f64::MIN_POSITIVE);
    let verts: Vec<Vec<usize>> = (0..cells).map(|i| cell_vertices(p, i)).collect();
    let mut worst = 0.0f64;
    for e in &verts {
        for f in &verts {
            let k = e.iter().zip(f).filter(|(a, b)| a == b).count();
            worst = worst.max((pair_cov(&c, e, f) - sig[k]).abs() / scale);
        }
    }
    Ok((pairs, worst))
}

/// All perfect matchings of `0..2k`, each as a list of pairs.
pub fn pairings(k: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(rest: &mut Vec<usize>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        let first = rest.remove(0);
        for i in 0..rest.len() {
            let partner = rest.remove(i);
            cur.push((first, partner));
            rec(rest, cur, out);
            cur.pop();
            rest.insert(i, partner);
        }
        rest.insert(0, first);
    }
    let mut out = Vec::new();
    rec(&mut (0..2 * k).collect(), &mut Vec::new(), &mut out);
    out
}

/// `E[prod_i Y_{labels[i]}]` for a centred Gaussian pair by Isserlis' theorem.
fn isserlis(labels: &[usize], cov: &[[f64; 2]; 2], pairings: &[Vec<(usize, usize)>]) -> f64 {
    pairings.iter().map(|pm| pm.iter().map(|&(a, b)| cov[labels[a]][labels[b]]).product::<f64>()).sum()
}

/// Outcome of [`brute_isserlis_check`].
#[derive(Clone, Debug, Serialize)]
pub struct IsserlisReport {
    pub pairs_checked: u64,
    pub pairings_of_six: usize,
    pub pairings_of_eight: usize,
    pub max_residual: f64,
    pub tolerance: f64,
}

pub const ISSERLIS_TOLERANCE: f64 = 1e-9;

/// Recompute `E[X_e^3 X_e'^3]`, `E[X_e^4]` and `Cov[X_e^4, X_e'^4]` from
/// covariance matrix entries by pair-partition enumeration and compare with
/// `9 s s s + 6 s^3`, `3 s^2` and `72 s s s^2 + 24 s^4` in terms of `varsigma`.
pub fn brute_isserlis_check(p: &DenseParams) -> Result<IsserlisReport> {
    let cells = cells_u64(p)?;
    if cells > ISSERLIS_MAX_CELLS {
        return Err(Error::domain(format!("Isserlis enumeration needs m^r <= {ISSERLIS_MAX_CELLS}, got {cells}")));
    }
    let c = covariance_matrix(p)?;
    let sig: Vec<f64> = (0..=p.r).map(|k| covariance_sigma(p, k)).collect::<Result<_>>()?;
    let sr = sig[p.r as usize];
    let (p4, p6, p8) = (pairings(2), pairings(3), pairings(4));
    let verts: Vec<Vec<usize>> = (0..cells).map(|i| cell_vertices(p, i)).collect();
    let mut worst = 0.0f64;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    for e in &verts {
        for f in &verts {
            let k = e.iter().zip(f).filter(|(a, b)| a == b).count();
            let s = sig[k];
            let cov = [[pair_cov(&c, e, e), pair_cov(&c, e, f)], [pair_cov(&c, f, e), pair_cov(&c, f, f)]];
            let e33 = isserlis(&[0, 0, 0, 1, 1, 1], &cov, &p6);
            worst = worst.max(rel(e33, 9.0 * sr * sr * s + 6.0 * s.powi(3)));
            let e4 = isserlis(&[0, 0, 0, 0], &cov, &p4);
            let f4 = isserlis(&[1, 1, 1, 1], &cov, &p4);
            worst = worst.max(rel(e4, 3.0 * sr * sr));
            let e44 = isserlis(&[0, 0, 0, 0, 1, 1, 1, 1], &cov, &p8) - e4 * f4;
            worst = worst.max(rel(e44, 72.0 * sr * sr * s * s + 24.0 * s.powi(4)));
        }
    }
    if worst.is_nan() || worst > ISSERLIS_TOLERANCE {
        return Err(Error::check(format!("Isserlis moments disagree with sigma formulas: residual {worst:e}")));
    }
    Ok(IsserlisReport {
        pairs_checked: cells * cells,
        pairings_of_six: p6.len(),
        pairings_of_eight: p8.len(),
        max_residual: worst,
        tolerance: ISSERLIS_TOLERANCE,
    })
}

/// Expectation and variances of `f_3`, `f_4` under the Gaussian measure.
#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    pub params: DenseParams,
    /// `varsigma(r) = Var X_e`.
    pub sigma_diag: f64,
    /// `varsigma(k)` for `k = 0..=r`.
    pub varsigma: Vec<f64>,
    pub e_f4: f64,
    /// `(1 - 6 Lambda)(m r - r + 1)^2 / (8 Lambda m^r)`.
    pub e_f4_closed: f64,
    pub e_f4_exact_match: bool,
    pub var_f3: f64,
    /// Closed form of the class sum, with its `m^-1` and `m^-2` corrections.
    pub var_f3_closed: f64,
    pub var_f3_exact_match: bool,
    pub var_f4: f64,
    /// `E f_4 + (Var f_4 - Var f_3) / 2`, i.e. `E f + (1/2) pseudovariance`.
    pub pseudo_combo: f64,
    /// `-r / (12 Lambda m^(r-2))`.
    pub combo_reference: f64,
    pub combo_gap: f64,
    /// `10 / n`.
    pub combo_tolerance: f64,
}

/// `E f_4`, `Var f_3`, `Var f_4` by intersection-class sums in exact
/// rational arithmetic, checked against their closed forms.
pub fn gaussian_moments(p: &DenseParams) -> Result<MomentReport> {
    p.require_nondegenerate()?;
    let (r, m) = (p.r, p.m);
    let big = p.big_lambda_exact();
    let lam = p.lambda.clone();
    let one = BigRational::one();
    let mr = int(BigInt::from(m).pow(r));
    let sig: Vec<BigRational> = (0..=r).map(|k| varsigma_exact(p, k)).collect::<Result<_>>()?;
    let sr = sig[r as usize].clone();

    let c4 = &big * (&one - int(6) * &big) / int(24);
    let e_f4 = &c4 * &mr * int(3) * &sr * &sr;
    let e_f4_closed = (&one - int(6) * &big) * int(m * r - r + 1).pow(2) / (int(8) * &big * &mr);

    // number of ordered pairs with |e ∩ e'| = k is m^r C(r,k) (m-1)^(r-k)
    let weight =
        |k: u32| int(BigInt::from(binomial_big(u64::from(r), u64::from(k)))) * int(BigInt::from(m - 1).pow(r - k));
    let mut s3 = BigRational::zero();
    let mut s4 = BigRational::zero();
    for k in 0..=r {
        let s = &sig[k as usize];
        let w = weight(k);
        s3 += &w * (int(9) * &sr * &sr * s + int(6) * s * s * s);
        s4 += &w * (int(72) * &sr * &sr * s * s + int(24) * s * s * s * s);
    }
    let c3 = &big * (&one - int(2) * &lam);
    let var_f3 = &c3 * &c3 / int(36) * &mr * s3;
    let var_f4 = &c4 * &c4 * &mr * s4;

    let (rq, mq) = (int(r), int(m));
    let lead = (&one - int(4) * &big) * &rq * int(3 * r + 2) * &mq / (int(12) * &big * int(BigInt::from(m).pow(r - 1)));
    let corr = &one - int(6 * (r - 1)) / (int(3 * r + 2) * &mq)
        + int((r - 1) * (3 * r - 5)) / (&rq * int(3 * r + 2) * &mq * &mq);
    let var_f3_closed = lead * corr;

    let combo = &e_f4 + (&var_f4 - &var_f3) / int(2);
    let combo_f = rational_to_f64(&combo);
    let reference = -f64::from(r) / (12.0 * p.big_lambda() * f64::from(m).powi(r as i32 - 2));
    Ok(MomentReport {
        params: p.clone(),
        sigma_diag: rational_to_f64(&sr),
        varsigma: sig.iter().map(rational_to_f64).collect(),
        e_f4: rational_to_f64(&e_f4),
        e_f4_closed: rational_to_f64(&e_f4_closed),
        e_f4_exact_match: e_f4 == e_f4_closed,
        var_f3: rational_to_f64(&var_f3),
        var_f3_closed: rational_to_f64(&var_f3_closed),
        var_f3_exact_match: var_f3 == var_f3_closed,
        var_f4: rational_to_f64(&var_f4),
        pseudo_combo: combo_f,
        combo_reference: reference,
        combo_gap: (combo_f - reference).abs(),
        combo_tolerance: 10.0 / p.n() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::matrix::max_abs_diff;
    use crate::numeric::big_rational;

    fn dp(r: u32, m: u32, num: i64, den: i64) -> DenseParams {
        DenseParams::new(r, m, big_rational(num, den)).unwrap()
    }

    #[test]
    fn varsigma_examples() {
        assert!((covariance_sigma(&dp(3, 10, 1, 2), 1).unwrap() - 0.032).abs() < 1e-15);
        // (r-1)/m = 1 at (3, 2)
        assert_eq!(covariance_sigma(&dp(3, 2, 1, 2), 1).unwrap(), 0.0);
        assert_eq!(covariance_sigma(&dp(3, 2, 1, 2), 3).unwrap(), 2.0);
        assert!(matches!(covariance_sigma(&dp(3, 2, 0, 1), 1), Err(Error::Domain(_))));
    }

    #[test]
    fn covariance_matrix_matches_explicit_entries() {
        for (r, m, num, den) in [(3, 2, 1, 2), (4, 3, 1, 4), (5, 5, 1, 10)] {
            let p = dp(r, m, num, den);
            let c = covariance_matrix(&p).unwrap();
            let e = explicit_covariance(&p).unwrap();
            assert!(max_abs_diff(&c, &e) <= 1e-12 * crate::analytic::matrix::max_abs(&e));
        }
    }

    #[test]
    fn edge_covariances_by_entry_summation() {
        let (pairs, worst) = edge_covariance_residual(&dp(3, 2, 1, 2)).unwrap();
        assert_eq!(pairs, 64);
        assert!(worst <= 1e-12);
    }

    #[test]
    fn pairing_counts() {
        assert_eq!(pairings(2).len(), 3);
        assert_eq!(pairings(3).len(), 15);
        assert_eq!(pairings(4).len(), 105);
    }

    #[test]
    fn isserlis_fourth_moment_example() {
        let p = dp(3, 2, 1, 2);
        let c = covariance_matrix(&p).unwrap();
        let e = cell_vertices(&p, 0);
        let s = pair_cov(&c, &e, &e);
        let e4 = isserlis(&[0, 0, 0, 0], &[[s, s], [s, s]], &pairings(2));
        assert!((e4 - 12.0).abs() < 1e-10);
    }

    #[test]
    fn isserlis_brute_checks() {
        for (r, m) in [(3, 2), (2, 2), (4, 2)] {
            let rep = brute_isserlis_check(&dp(r, m, 1, 2)).unwrap();
            assert_eq!(rep.pairs_checked, 1u64 << (2 * r));
            assert_eq!(rep.pairings_of_six, 15);
            assert_eq!(rep.pairings_of_eight, 105);
        }
        assert!(matches!(brute_isserlis_check(&dp(3, 3, 1, 2)), Err(Error::Domain(_))));
    }

    #[test]
    fn isserlis_covers_minimal_overlap() {
        // at (3, 2) cell 0 = (0,0,0) and cell 7 = (1,1,1) share no vertex
        let p = dp(3, 2, 1, 3);
        let c = covariance_matrix(&p).unwrap();
        let (e, f) = (cell_vertices(&p, 0), cell_vertices(&p, 7));
        let s0 = covariance_sigma(&p, 0).unwrap();
        assert!((pair_cov(&c, &e, &f) - s0).abs() < 1e-12 * s0.abs().max(1.0));
    }

    #[test]
    fn var_f3_closed_form_exact() {
        for (r, m, num, den) in [(3, 2, 1, 2), (4, 5, 1, 4), (3, 3, 9, 10), (5, 5, 1, 10), (2, 3, 1, 3)] {
            let rep = gaussian_moments(&dp(r, m, num, den)).unwrap();
            assert!(rep.var_f3_exact_match, "({r},{m},{num}/{den})");
            assert!(rep.e_f4_exact_match, "({r},{m},{num}/{den})");
            assert!(rep.var_f3 >= 0.0 && rep.var_f4 >= 0.0);
        }
    }

    #[test]
    fn var_f3_frozen_values() {
        // exact rational oracle evaluated independently
        let rep = gaussian_moments(&dp(4, 5, 1, 4)).unwrap();
        assert!((rep.var_f3 - 0.18862222222222222).abs() < 1e-15);
        assert!((rep.pseudo_combo + 0.1324696414814815).abs() < 1e-14);
        let rep = gaussian_moments(&dp(3, 3, 9, 10)).unwrap();
        assert!((rep.var_f3 - 4.323731138545953).abs() < 1e-12);
    }

    #[test]
    fn pseudo_combo_near_reference() {
        let rep = gaussian_moments(&dp(3, 200, 1, 2)).unwrap();
        assert!(rep.combo_gap <= 10.0 / 600.0);
        assert!((rep.pseudo_combo + 0.011174257481260417).abs() < 1e-15);
    }
}
