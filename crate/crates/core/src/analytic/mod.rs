//! Dense-regime complex-analytic machinery.
//!
//! `F(theta) = prod_e (1 + lambda (e^{i sum_{j in e} theta_j} - 1)) e^{-i d sum_j theta_j}`
//! is the Cauchy-integral integrand whose constant Fourier coefficient,
//! rescaled by `(lambda^lambda (1-lambda)^(1-lambda))^(-m^r)`, equals
//! `H_r(d,m)`. This module evaluates it, checks its symmetries, and builds
//! the structured matrices and Gaussian moments behind the dense formula.

pub mod matrix;
pub mod moments;
pub mod verify;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hypergraph::Params;
use crate::numeric::rational_to_f64;

pub use matrix::{build_matrices, Matrices, StructuredMatrix};
pub use moments::{
    brute_isserlis_check, covariance_matrix, covariance_sigma, gaussian_moments, pairings, IsserlisReport, MomentReport,
};
pub use verify::{
    dense_pipeline_log, dense_pipeline_report, kernel_check, run_suite, verify_linear_lemma, verify_qw_det, Clause,
    PipelineReport, Suite, SuiteReport,
};

/// Largest `m^r` for which [`eval_f`] walks every cell.
pub const MAX_F_CELLS: u64 = 50_000_000;

/// Arity, class size and a rational density `lambda` in `[0, 1]`.
///
/// `d = lambda m^(r-1)` need not be an integer here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseParams {
    pub r: u32,
    pub m: u32,
    pub lambda: BigRational,
}

impl DenseParams {
    pub fn new(r: u32, m: u32, lambda: BigRational) -> Result<Self> {
        if r < 2 {
            return Err(Error::domain(format!("need r >= 2, got {r}")));
        }
        if m < 1 {
            return Err(Error::domain("need m >= 1"));
        }
        if lambda.is_negative() || lambda > BigRational::one() {
            return Err(Error::domain(format!("lambda = {lambda} is outside [0, 1]")));
        }
        if u64::from(r) * u64::from(m) > u64::from(u32::MAX) {
            return Err(Error::domain("r m is too large"));
        }
        Ok(DenseParams { r, m, lambda })
    }

    /// Parameters with `lambda = d / m^(r-1)` taken from a graph instance.
    pub fn from_params(p: &Params) -> Result<Self> {
        let per = BigInt::from(p.m).pow(p.r - 1);
        DenseParams::new(p.r, p.m, BigRational::new(BigInt::from(p.d), per))
    }

    /// Parse `p/q`, an integer, or a terminating decimal as `lambda`.
    pub fn parse(r: u32, m: u32, lambda: &str) -> Result<Self> {
        DenseParams::new(r, m, parse_rational(lambda)?)
    }

    pub fn n(&self) -> usize {
        (self.r * self.m) as usize
    }

    /// `m^r` as a float, for formulas only.
    pub fn cells_f64(&self) -> f64 {
        f64::from(self.m).powi(self.r as i32)
    }

    pub fn lam(&self) -> f64 {
        rational_to_f64(&self.lambda)
    }

    /// `Lambda = lambda (1 - lambda)` exactly.
    pub fn big_lambda_exact(&self) -> BigRational {
        &self.lambda * (BigRational::one() - &self.lambda)
    }

    pub fn big_lambda(&self) -> f64 {
        rational_to_f64(&self.big_lambda_exact())
    }

    /// `d = lambda m^(r-1)`.
    pub fn d(&self) -> f64 {
        self.lam() * f64::from(self.m).powi(self.r as i32 - 1)
    }

    /// `Some(d)` when `lambda m^(r-1)` is an integer.
    pub fn integral_d(&self) -> Option<u64> {
        let d = &self.lambda * BigRational::from_integer(BigInt::from(self.m).pow(self.r - 1));
        if d.is_integer() {
            d.to_integer().to_u64()
        } else {
            None
        }
    }

    /// Error unless `0 < lambda < 1`.
    pub fn require_nondegenerate(&self) -> Result<()> {
        if self.big_lambda_exact().is_zero() {
            return Err(Error::domain("needs 0 < lambda < 1 (Lambda = 0)"));
        }
        Ok(())
    }

    /// Vertex index of coordinate `k` in class `t`.
    pub fn vertex(&self, t: u32, k: u32) -> usize {
        (t * self.m + k) as usize
    }

    pub fn lambda_string(&self) -> String {
        format_rational(&self.lambda)
    }
}

impl Serialize for DenseParams {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("DenseParams", 3)?;
        st.serialize_field("r", &self.r)?;
        st.serialize_field("m", &self.m)?;
        st.serialize_field("lambda", &self.lambda_string())?;
        st.end()
    }
}

impl fmt::Display for DenseParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(r={}, m={}, lambda={})", self.r, self.m, self.lambda_string())
    }
}

/// `p/q`, or `p` alone for integers.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parse `p/q`, an integer, or a terminating decimal such as `0.25`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::domain(format!("cannot parse {s:?} as a rational number"));
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::domain("zero denominator"));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int = if int.is_empty() || int == "-" { "0" } else { int };
        let whole = BigInt::from_str(int).map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let part = BigRational::new(BigInt::from_str(frac).map_err(|_| bad())?, scale);
        let whole = BigRational::from_integer(whole);
        return Ok(if negative { whole - part } else { whole + part });
    }
    BigInt::from_str(s).map(BigRational::from_integer).map_err(|_| bad())
}

fn check_theta(theta: &[f64], p: &DenseParams) -> Result<()> {
    if theta.len() != p.n() {
        return Err(Error::domain(format!("theta has length {}, expected n = {}", theta.len(), p.n())));
    }
    Ok(())
}

/// Visit every cell's coordinate sum `sum_{j in e} theta_j`.
fn for_each_edge_sum(theta: &[f64], p: &DenseParams, mut visit: impl FnMut(f64)) -> Result<()> {
    let cells = u64::from(p.m).checked_pow(p.r).unwrap_or(u64::MAX);
    if cells > MAX_F_CELLS {
        return Err(Error::BudgetExceeded {
            what: "cells",
            needed: u128::from(cells),
            budget: u128::from(MAX_F_CELLS),
        });
    }
    let (r, m) = (p.r as usize, p.m as usize);
    let mut coords = vec![0usize; r];
    // partial[t] = sum of the chosen coordinates in classes 0..t
    let mut partial = vec![0.0f64; r + 1];
    for t in 0..r {
        partial[t + 1] = partial[t] + theta[t * m];
    }
    loop {
        visit(partial[r]);
        let mut t = r;
        loop {
            if t == 0 {
                return Ok(());
            }
            t -= 1;
            coords[t] += 1;
            if coords[t] < m {
                break;
            }
            coords[t] = 0;
        }
        for u in t..r {
            partial[u + 1] = partial[u] + theta[u * m + coords[u]];
        }
    }
}

/// The integrand `F(theta)`; `|F| <= 1` everywhere and `F(0) = 1`.
pub fn eval_f(theta: &[f64], p: &DenseParams) -> Result<Complex64> {
    p.require_nondegenerate()?;
    check_theta(theta, p)?;
    let lam = p.lam();
    let mut prod = Complex64::one();
    for_each_edge_sum(theta, p, |s| {
        prod *= Complex64::new(1.0 - lam + lam * s.cos(), lam * s.sin());
    })?;
    let total: f64 = theta.iter().sum();
    Ok(prod * Complex64::from_polar(1.0, -p.d() * total))
}

/// `log F(theta)` as the sum of per-factor principal logarithms.
///
/// This is the branch on which the Taylor expansion holds, valid while no
/// factor winds around the origin (small `theta`).
pub fn log_f(theta: &[f64], p: &DenseParams) -> Result<Complex64> {
    p.require_nondegenerate()?;
    check_theta(theta, p)?;
    let lam = p.lam();
    let mut acc = Complex64::zero();
    for_each_edge_sum(theta, p, |s| {
        acc += Complex64::new(1.0 - lam + lam * s.cos(), lam * s.sin()).ln();
    })?;
    let total: f64 = theta.iter().sum();
    Ok(acc - Complex64::new(0.0, p.d() * total))
}

/// Wrap an angle to `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let y = x - two_pi * ((x - PI) / two_pi).ceil();
    if y <= -PI {
        y + two_pi
    } else {
        y
    }
}

/// Distance from `x` to the nearest multiple of `2 pi`, in `[0, pi]`.
pub fn circular_norm(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let y = x.rem_euclid(two_pi);
    y.min(two_pi - y).max(0.0)
}

/// Add `c_t` to every coordinate in class `t`, wrapping to `(-pi, pi]`.
///
/// Requires `sum_t c_t = 0 (mod 2 pi)` to within `1e-9`.
pub fn apply_phi(theta: &[f64], c: &[f64], p: &DenseParams) -> Result<Vec<f64>> {
    check_theta(theta, p)?;
    if c.len() != p.r as usize {
        return Err(Error::domain(format!("c has length {}, expected r = {}", c.len(), p.r)));
    }
    let total: f64 = c.iter().sum();
    if circular_norm(total) > 1e-9 {
        return Err(Error::domain(format!("sum of c is {total}, not a multiple of 2 pi")));
    }
    let m = p.m as usize;
    Ok(theta.iter().enumerate().map(|(j, &x)| wrap_angle(x + c[j / m])).collect())
}

/// Add `c_t` to class `t` without wrapping.
///
/// When `d` is not an integer `F` is not `2 pi`-periodic, so the symmetry
/// only holds for exact shifts with `sum_t c_t = 0`.
pub fn shift_classes(theta: &[f64], c: &[f64], p: &DenseParams) -> Result<Vec<f64>> {
    check_theta(theta, p)?;
    if c.len() != p.r as usize {
        return Err(Error::domain(format!("c has length {}, expected r = {}", c.len(), p.r)));
    }
    let m = p.m as usize;
    Ok(theta.iter().enumerate().map(|(j, &x)| x + c[j / m]).collect())
}

/// `(sqrt(1 - 2 Lambda (1 - cos x)), exp(-(Lambda/2)(1 - |x|^2/12)|x|^2))`
/// with `|x|` the circular norm; the first never exceeds the second.
pub fn factor_bound_check(x: f64, lam: f64) -> (f64, f64) {
    let big = lam * (1.0 - lam);
    let lhs = (1.0 - 2.0 * big * (1.0 - x.cos())).max(0.0).sqrt();
    let y = circular_norm(x);
    let rhs = (-(big / 2.0) * (1.0 - y * y / 12.0) * y * y).exp();
    (lhs, rhs)
}

/// Whether [`factor_bound_check`] holds, allowing a few ulps of rounding.
pub fn factor_bound_holds(x: f64, lam: f64) -> bool {
    let (lhs, rhs) = factor_bound_check(x, lam);
    lhs <= rhs * (1.0 + 4.0 * f64::EPSILON)
}

/// Serialize a complex number as `[re, im]`.
fn complex_pairs<S: Serializer>(a: &[Complex64; 4], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<[f64; 2]> = a.iter().map(|z| [z.re, z.im]).collect();
    v.serialize(s)
}

/// Taylor coefficients `a_1..a_4` of `log(1 + lambda (e^{ix} - 1))` at 0.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaylorCoeffs {
    pub lambda: f64,
    #[serde(serialize_with = "complex_pairs")]
    pub a: [Complex64; 4],
}

impl TaylorCoeffs {
    /// Coefficient `a_p` for `p` in `1..=4`.
    pub fn get(&self, p: usize) -> Complex64 {
        self.a[p - 1]
    }
}

/// `a_1 = i lambda`, `a_2 = -Lambda/2`, `a_3 = -(i/6) Lambda (1 - 2 lambda)`,
/// `a_4 = Lambda (1 - 6 Lambda) / 24`.
pub fn taylor_coeffs(lam: f64) -> Result<TaylorCoeffs> {
    if !(0.0..=1.0).contains(&lam) {
        return Err(Error::domain(format!("lambda = {lam} is outside [0, 1]")));
    }
    let big = lam * (1.0 - lam);
    Ok(TaylorCoeffs {
        lambda: lam,
        a: [
            Complex64::new(0.0, lam),
            Complex64::new(-big / 2.0, 0.0),
            Complex64::new(0.0, -big * (1.0 - 2.0 * lam) / 6.0),
            Complex64::new(big * (1.0 - 6.0 * big) / 24.0, 0.0),
        ],
    })
}

fn log_factor(x: f64, lam: f64) -> Complex64 {
    Complex64::new(1.0 - lam + lam * x.cos(), lam * x.sin()).ln()
}

/// The same coefficients from Richardson-extrapolated central differences.
pub fn finite_difference_coeffs(lam: f64) -> [Complex64; 4] {
    let f = |x: f64| log_factor(x, lam);
    let d1 = |h: f64| (f(h) - f(-h)) / (2.0 * h);
    let d2 = |h: f64| (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
    let d3 = |h: f64| (f(2.0 * h) - 2.0 * f(h) + 2.0 * f(-h) - f(-2.0 * h)) / (2.0 * h * h * h);
    let d4 = |h: f64| (f(2.0 * h) - 4.0 * f(h) + 6.0 * f(0.0) - 4.0 * f(-h) + f(-2.0 * h)) / h.powi(4);
    let rich = |g: &dyn Fn(f64) -> Complex64, h: f64| (g(h / 2.0) * 4.0 - g(h)) / 3.0;
    [rich(&d1, 1e-3), rich(&d2, 1e-3) / 2.0, rich(&d3, 2e-2) / 6.0, rich(&d4, 2e-2) / 24.0]
}

/// Largest `|a_p - finite difference|` over `p = 1..4`.
pub fn taylor_coeff_residual(lam: f64) -> Result<f64> {
    let exact = taylor_coeffs(lam)?;
    let numeric = finite_difference_coeffs(lam);
    Ok(exact.a.iter().zip(numeric.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
}

/// The fourth-order expansion
/// `-theta^T A theta + sum_{p=3,4} a_p sum_e (sum_{j in e} theta_j)^p`.
pub fn taylor_model(theta: &[f64], p: &DenseParams) -> Result<Complex64> {
    p.require_nondegenerate()?;
    check_theta(theta, p)?;
    let c = taylor_coeffs(p.lam())?;
    let (mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0);
    for_each_edge_sum(theta, p, |s| {
        let sq = s * s;
        s2 += sq;
        s3 += sq * s;
        s4 += sq * sq;
    })?;
    // theta^T A theta = (Lambda/2) sum_e s_e^2
    Ok(c.get(2) * s2 + c.get(3) * s3 + c.get(4) * s4)
}

/// Ratio `|log F - model| / (10 Lambda m^r (r |theta|_inf)^5)` at one point.
pub fn taylor_residual_ratio(theta: &[f64], p: &DenseParams) -> Result<f64> {
    let diff = (log_f(theta, p)? - taylor_model(theta, p)?).norm();
    let sup = theta.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let bound = 10.0 * p.big_lambda() * p.cells_f64() * (f64::from(p.r) * sup).powi(5);
    if bound == 0.0 {
        return Ok(if diff == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(diff / bound)
}

/// Half-width `0.1 / sqrt(Lambda m^(r-1))` of the box used for the Taylor test.
pub fn taylor_box(p: &DenseParams) -> f64 {
    0.1 / (p.big_lambda() * f64::from(p.m).powi(p.r as i32 - 1)).sqrt()
}

/// Uniform point in `[-h, h]^n`.
pub fn random_box_point<R: Rng + ?Sized>(p: &DenseParams, h: f64, rng: &mut R) -> Vec<f64> {
    (0..p.n()).map(|_| rng.gen_range(-h..=h)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::big_rational;
    use crate::rng::RngStream;
    use proptest::prelude::*;
    use rand::Rng;

    fn dp(r: u32, m: u32, num: i64, den: i64) -> DenseParams {
        DenseParams::new(r, m, big_rational(num, den)).unwrap()
    }

    #[test]
    fn parse_lambda_forms() {
        assert_eq!(parse_rational("1/2").unwrap(), big_rational(1, 2));
        assert_eq!(parse_rational("0.25").unwrap(), big_rational(1, 4));
        assert_eq!(parse_rational("1").unwrap(), big_rational(1, 1));
        assert_eq!(parse_rational(".5").unwrap(), big_rational(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(DenseParams::parse(3, 2, "3/2").is_err());
        assert_eq!(dp(3, 2, 2, 4).lambda_string(), "1/2");
    }

    #[test]
    fn integrand_at_origin_is_one() {
        let p = dp(3, 2, 1, 2);
        let f = eval_f(&[0.0; 6], &p).unwrap();
        assert_eq!(f, Complex64::one());
    }

    #[test]
    fn integrand_modulus_at_most_one() {
        let p = dp(3, 2, 1, 2);
        let mut rng = RngStream::new(11, 0).rng();
        for _ in 0..1000 {
            let theta: Vec<f64> = (0..6).map(|_| rng.gen_range(-PI..PI)).collect();
            assert!(eval_f(&theta, &p).unwrap().norm() <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn integrand_rejects_degenerate_density() {
        assert!(matches!(eval_f(&[0.0; 6], &dp(3, 2, 0, 1)), Err(Error::Domain(_))));
        assert!(matches!(eval_f(&[0.0; 6], &dp(3, 2, 1, 1)), Err(Error::Domain(_))));
        assert!(matches!(eval_f(&[0.0; 5], &dp(3, 2, 1, 2)), Err(Error::Domain(_))));
    }

    #[test]
    fn integrand_matches_direct_product() {
        let p = dp(3, 2, 1, 4);
        let theta = [0.3, -0.2, 1.1, 0.4, -0.9, 0.05];
        let lam = 0.25;
        let mut direct = Complex64::one();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    let s = theta[a] + theta[2 + b] + theta[4 + c];
                    direct *= Complex64::one() + lam * (Complex64::from_polar(1.0, s) - 1.0);
                }
            }
        }
        direct *= Complex64::from_polar(1.0, -theta.iter().sum::<f64>());
        assert!((eval_f(&theta, &p).unwrap() - direct).norm() < 1e-14);
    }

    #[test]
    fn phi_zero_shift_is_identity() {
        let p = dp(3, 2, 1, 2);
        let theta = [0.1, -0.2, 0.3, 3.0, -3.0, 0.0];
        assert_eq!(apply_phi(&theta, &[0.0; 3], &p).unwrap(), theta.to_vec());
    }

    #[test]
    fn phi_full_turn_is_identity_after_wrapping() {
        let p = dp(3, 2, 1, 2);
        let theta = [0.1, -0.2, 0.3, 3.0, -3.0, 0.0];
        let out = apply_phi(&theta, &[2.0 * PI, 0.0, 0.0], &p).unwrap();
        for (a, b) in out.iter().zip(theta.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_preserves_integrand() {
        let p = dp(3, 2, 1, 2);
        let mut rng = RngStream::new(5, 0).rng();
        let c = [PI / 3.0, PI / 3.0, -2.0 * PI / 3.0];
        for _ in 0..200 {
            let theta: Vec<f64> = (0..6).map(|_| rng.gen_range(-PI..PI)).collect();
            let f0 = eval_f(&theta, &p).unwrap();
            let f1 = eval_f(&apply_phi(&theta, &c, &p).unwrap(), &p).unwrap();
            assert!((f1 - f0).norm() <= 1e-10);
        }
    }

    #[test]
    fn phi_rejects_unbalanced_shift() {
        let p = dp(3, 2, 1, 2);
        assert!(matches!(apply_phi(&[0.0; 6], &[0.1, 0.0, 0.0], &p), Err(Error::Domain(_))));
    }

    #[test]
    fn circular_norm_examples() {
        assert_eq!(circular_norm(0.0), 0.0);
        assert!((circular_norm(1.5 * PI) - PI / 2.0).abs() < 1e-15);
        assert!((circular_norm(-7.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
    }

    #[test]
    fn factor_bound_examples() {
        assert_eq!(factor_bound_check(0.0, 0.3), (1.0, 1.0));
        let (lhs, rhs) = factor_bound_check(PI, 0.5);
        assert!(lhs.abs() < 1e-8);
        let expected = (-(PI * PI / 8.0) * (1.0 - PI * PI / 12.0)).exp();
        assert!((rhs - expected).abs() < 1e-15);
        assert!(rhs > 0.0);
    }

    #[test]
    fn factor_bound_sweep() {
        let mut rng = RngStream::new(17, 0).rng();
        for _ in 0..10_000 {
            let x = rng.gen_range(-10.0..=10.0);
            let lam = rng.gen_range(0.0..=1.0);
            assert!(factor_bound_holds(x, lam), "x = {x}, lambda = {lam}");
        }
    }

    #[test]
    fn taylor_at_half() {
        let c = taylor_coeffs(0.5).unwrap();
        assert_eq!(c.get(2), Complex64::new(-1.0 / 8.0, 0.0));
        assert_eq!(c.get(3), Complex64::zero());
        assert!((c.get(4).re + 1.0 / 192.0).abs() < 1e-18);
    }

    #[test]
    fn taylor_cubic_vanishes_only_at_half() {
        for k in 1..20 {
            let lam = f64::from(k) / 20.0;
            let zero = taylor_coeffs(lam).unwrap().get(3).norm() == 0.0;
            assert_eq!(zero, k == 10);
        }
    }

    #[test]
    fn taylor_matches_finite_differences() {
        for lam in [0.25, 0.1, 0.5, 0.9] {
            assert!(taylor_coeff_residual(lam).unwrap() < 1e-6, "lambda = {lam}");
        }
    }

    #[test]
    fn taylor_residual_in_small_box() {
        let p = dp(3, 4, 1, 2);
        let h = taylor_box(&p);
        let mut rng = RngStream::new(23, 0).rng();
        for _ in 0..50 {
            let theta = random_box_point(&p, h, &mut rng);
            assert!(taylor_residual_ratio(&theta, &p).unwrap() <= 1.0);
        }
    }

    proptest! {
        #[test]
        fn circular_norm_triangle(x in -50.0f64..50.0, y in -50.0f64..50.0) {
            let lhs = circular_norm(x + y);
            prop_assert!(lhs <= circular_norm(x) + circular_norm(y) + 1e-12);
            prop_assert!((0.0..=PI).contains(&lhs));
        }

        #[test]
        fn integrand_symmetry_property(
            seed in any::<u64>(),
            c0 in -PI..PI,
            c1 in -PI..PI,
            turns in -2i32..=2,
        ) {
            let p = dp(3, 3, 1, 3);
            let mut rng = RngStream::new(seed, 0).rng();
            let theta: Vec<f64> = (0..9).map(|_| rng.gen_range(-PI..PI)).collect();
            let c = [c0, c1, -c0 - c1 + 2.0 * PI * f64::from(turns)];
            let f0 = eval_f(&theta, &p).unwrap();
            let f1 = eval_f(&apply_phi(&theta, &c, &p).unwrap(), &p).unwrap();
            prop_assert!((f1 - f0).norm() <= 1e-10 * f0.norm().max(1e-300));
        }

        #[test]
        fn integrand_bounded_property(seed in any::<u64>(), num in 1i64..10) {
            let p = dp(3, 2, num, 10);
            let mut rng = RngStream::new(seed, 1).rng();
            let theta: Vec<f64> = (0..6).map(|_| rng.gen_range(-10.0..10.0)).collect();
            prop_assert!(eval_f(&theta, &p).unwrap().norm() <= 1.0 + 1e-14);
        }
    }
}
