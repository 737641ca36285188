//! Matrices of the form `alpha I + beta B + gamma J` on `n = r m` coordinates.
//!
//! `B` is block diagonal with one all-ones `m x m` block per class and `J` is
//! the all-ones matrix, so `B^2 = m B`, `B J = J B = m J`, `J^2 = r m J`.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::DenseParams;
use crate::error::{Error, Result};

/// `alpha I + beta B + gamma J` at a fixed `(r, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StructuredMatrix {
    pub r: u32,
    pub m: u32,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl StructuredMatrix {
    pub fn new(r: u32, m: u32, alpha: f64, beta: f64, gamma: f64) -> Self {
        StructuredMatrix { r, m, alpha, beta, gamma }
    }

    pub fn identity(r: u32, m: u32) -> Self {
        Self::new(r, m, 1.0, 0.0, 0.0)
    }

    /// The class-block all-ones matrix `B`.
    pub fn block(r: u32, m: u32) -> Self {
        Self::new(r, m, 0.0, 1.0, 0.0)
    }

    /// The all-ones matrix `J`.
    pub fn ones(r: u32, m: u32) -> Self {
        Self::new(r, m, 0.0, 0.0, 1.0)
    }

    pub fn n(&self) -> usize {
        (self.r * self.m) as usize
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.r, self.m, s * self.alpha, s * self.beta, s * self.gamma)
    }

    fn same_shape(&self, other: &Self) {
        assert_eq!((self.r, self.m), (other.r, other.m), "structured matrices of different shapes");
    }

    /// Entry `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let m = self.m as usize;
        let mut v = self.gamma;
        if i / m == j / m {
            v += self.beta;
        }
        if i == j {
            v += self.alpha;
        }
        v
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |i, j| self.entry(i, j))
    }

    /// `(value, multiplicity)` on the three invariant subspaces: vectors
    /// summing to zero in each class, class-constant vectors summing to zero,
    /// and the constant vector.
    pub fn eigenvalues(&self) -> [(f64, usize); 3] {
        let (r, m) = (f64::from(self.r), f64::from(self.m));
        let on_blocks = self.alpha + self.beta * m;
        [
            (self.alpha, self.n() - self.r as usize),
            (on_blocks, self.r as usize - 1),
            (on_blocks + self.gamma * r * m, 1),
        ]
    }

    /// `log |det|`, or `-inf` when singular.
    pub fn log_abs_det(&self) -> f64 {
        self.eigenvalues().iter().filter(|(_, k)| *k > 0).map(|(v, k)| *k as f64 * v.abs().ln()).sum()
    }

    pub fn det(&self) -> f64 {
        self.eigenvalues().iter().map(|(v, k)| v.powi(*k as i32)).product()
    }

    /// Inverse, itself of the same form.
    pub fn inverse(&self) -> Result<Self> {
        let [(a, _), (b, kb), (c, _)] = self.eigenvalues();
        if a == 0.0 || (kb > 0 && b == 0.0) || c == 0.0 {
            return Err(Error::domain("structured matrix is singular"));
        }
        let (r, m) = (f64::from(self.r), f64::from(self.m));
        let alpha = 1.0 / a;
        let beta = (1.0 / b - 1.0 / a) / m;
        let gamma = (1.0 / c - 1.0 / b) / (r * m);
        Ok(Self::new(self.r, self.m, alpha, beta, gamma))
    }

    /// `max_i sum_j |entry(i, j)|`, equal to the 1-norm by symmetry.
    pub fn inf_norm(&self) -> f64 {
        let n = self.n() as f64;
        let m = f64::from(self.m);
        (self.alpha + self.beta + self.gamma).abs()
            + (m - 1.0) * (self.beta + self.gamma).abs()
            + (n - m) * self.gamma.abs()
    }
}

impl Add for &StructuredMatrix {
    type Output = StructuredMatrix;
    fn add(self, o: &StructuredMatrix) -> StructuredMatrix {
        self.same_shape(o);
        StructuredMatrix::new(self.r, self.m, self.alpha + o.alpha, self.beta + o.beta, self.gamma + o.gamma)
    }
}

impl Sub for &StructuredMatrix {
    type Output = StructuredMatrix;
    fn sub(self, o: &StructuredMatrix) -> StructuredMatrix {
        self.same_shape(o);
        StructuredMatrix::new(self.r, self.m, self.alpha - o.alpha, self.beta - o.beta, self.gamma - o.gamma)
    }
}

impl Mul for &StructuredMatrix {
    type Output = StructuredMatrix;
    fn mul(self, o: &StructuredMatrix) -> StructuredMatrix {
        self.same_shape(o);
        let (r, m) = (f64::from(self.r), f64::from(self.m));
        let (a1, b1, c1) = (self.alpha, self.beta, self.gamma);
        let (a2, b2, c2) = (o.alpha, o.beta, o.gamma);
        StructuredMatrix::new(
            self.r,
            self.m,
            a1 * a2,
            a1 * b2 + b1 * a2 + m * b1 * b2,
            a1 * c2 + c1 * a2 + m * b1 * c2 + m * c1 * b2 + r * m * c1 * c2,
        )
    }
}

impl Mul<f64> for &StructuredMatrix {
    type Output = StructuredMatrix;
    fn mul(self, s: f64) -> StructuredMatrix {
        self.scale(s)
    }
}

/// Kernel vectors `v_j = 1_{V_j} - 1_{V_1}` for `j = 2..r` (class `j` is
/// 1-based here, so `v_j` covers 0-based class `j - 1`).
pub fn kernel_vectors(r: u32, m: u32) -> Vec<DVector<f64>> {
    let n = (r * m) as usize;
    let m = m as usize;
    (1..r as usize)
        .map(|t| {
            DVector::from_fn(n, |i, _| {
                if i / m == t {
                    1.0
                } else if i / m == 0 {
                    -1.0
                } else {
                    0.0
                }
            })
        })
        .collect()
}

/// `Q = I - sum_{j=2}^r v_j e_{jm}^T`: projection onto the slice where the
/// last coordinate of every class but the first is zero.
pub fn q_matrix(r: u32, m: u32) -> DMatrix<f64> {
    let n = (r * m) as usize;
    let mut q = DMatrix::<f64>::identity(n, n);
    for (k, v) in kernel_vectors(r, m).iter().enumerate() {
        let col = (k + 2) * m as usize - 1;
        for i in 0..n {
            q[(i, col)] -= v[i];
        }
    }
    q
}

/// The operators of the dense analysis at one parameter point.
///
/// `q` does not have the structured form and is kept dense.
#[derive(Clone, Debug)]
pub struct Matrices {
    /// `A = (1/2) Lambda m^(r-1) (I - B/m + J/m)`, the quadratic form of `log F`.
    pub a: StructuredMatrix,
    /// `W = (Lambda m^(r-3) / 2r)^(1/2) (r B - J)`, penalising `ker A`.
    pub w: StructuredMatrix,
    /// `T = (2 / (Lambda m^(r-1)))^(1/2) (I - (sqrt r - 1)/(sqrt r m) B)`, whitening `A + W^T W`.
    pub t: StructuredMatrix,
    /// `P = I - kappa W` with `kappa = (1/r)(2r / (Lambda m^(r-1)))^(1/2)`.
    pub p: StructuredMatrix,
    /// `R = kappa I`; together `P Q + R W = I`.
    pub r: StructuredMatrix,
    pub q: DMatrix<f64>,
}

impl Matrices {
    /// `A + W^T W` in structured form.
    pub fn a_plus_wtw(&self) -> StructuredMatrix {
        &self.a + &(&self.w * &self.w)
    }
}

pub fn build_matrices(dp: &DenseParams) -> Result<Matrices> {
    dp.require_nondegenerate()?;
    let (r, m) = (dp.r, dp.m);
    let (rf, mf) = (f64::from(r), f64::from(m));
    let big = dp.big_lambda();
    let scale = big * mf.powi(r as i32 - 1);
    let a = StructuredMatrix::new(r, m, scale / 2.0, -scale / (2.0 * mf), scale / (2.0 * mf));
    let wc = (big * mf.powi(r as i32 - 3) / (2.0 * rf)).sqrt();
    let w = StructuredMatrix::new(r, m, 0.0, wc * rf, -wc);
    let tc = (2.0 / scale).sqrt();
    let t = StructuredMatrix::new(r, m, tc, -tc * (rf.sqrt() - 1.0) / (rf.sqrt() * mf), 0.0);
    let kappa = (2.0 * rf / scale).sqrt() / rf;
    let p = &StructuredMatrix::identity(r, m) - &w.scale(kappa);
    let r_op = StructuredMatrix::identity(r, m).scale(kappa);
    Ok(Matrices { a, w, t, p, r: r_op, q: q_matrix(r, m) })
}

/// Largest absolute entry of `x - y`.
pub fn max_abs_diff(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    (x - y).iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Largest absolute entry.
pub fn max_abs(x: &DMatrix<f64>) -> f64 {
    x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// `max_i sum_j |x_ij|`.
pub fn dense_inf_norm(x: &DMatrix<f64>) -> f64 {
    x.row_iter().map(|row| row.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// `max_j sum_i |x_ij|`.
pub fn dense_one_norm(x: &DMatrix<f64>) -> f64 {
    x.column_iter().map(|col| col.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// `log |det x|` from an LU factorisation.
pub fn dense_log_abs_det(x: &DMatrix<f64>) -> f64 {
    let lu = x.clone().lu();
    lu.u().diagonal().iter().map(|v| v.abs().ln()).sum()
}

/// Numerical rank with singular values below `rel_tol * max` treated as zero.
pub fn dense_rank(x: &DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = x.clone().singular_values();
    let top = sv.iter().fold(0.0f64, |a, &v| a.max(v));
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&v| v > rel_tol * top).count()
}
