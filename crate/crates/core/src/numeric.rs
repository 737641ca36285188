//! Scalar types: exact counts and signed log-space reals, plus the
//! factorial/binomial primitives every estimator is built on.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

/// Arguments up to this size use exact big-integer factorials; above it the
/// log-gamma function is used.
pub const EXACT_LOG_THRESHOLD: u64 = 10_000;

/// Exact arbitrary-precision nonnegative count.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigCount(pub BigUint);

impl BigCount {
    pub fn zero() -> Self {
        BigCount(BigUint::zero())
    }

    pub fn one() -> Self {
        BigCount(BigUint::one())
    }

    pub fn from_u64(v: u64) -> Self {
        BigCount(BigUint::from(v))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn ln(&self) -> f64 {
        ln_biguint(&self.0)
    }

    pub fn to_log_real(&self) -> LogReal {
        if self.is_zero() {
            LogReal::zero()
        } else {
            LogReal::from_log(self.ln())
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<BigUint> for BigCount {
    fn from(v: BigUint) -> Self {
        BigCount(v)
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        BigCount::from_u64(v)
    }
}

impl Serialize for BigCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl Add for &BigCount {
    type Output = BigCount;
    fn add(self, rhs: &BigCount) -> BigCount {
        BigCount(&self.0 + &rhs.0)
    }
}

impl Mul for &BigCount {
    type Output = BigCount;
    fn mul(self, rhs: &BigCount) -> BigCount {
        BigCount(&self.0 * &rhs.0)
    }
}

/// A signed real stored as `sign * exp(log_abs)`.
///
/// `sign == 0` encodes exact zero, in which case `log_abs` is `-inf`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogReal {
    pub sign: i8,
    pub log_abs: f64,
}

impl LogReal {
    pub fn zero() -> Self {
        LogReal { sign: 0, log_abs: f64::NEG_INFINITY }
    }

    pub fn one() -> Self {
        LogReal { sign: 1, log_abs: 0.0 }
    }

    /// Positive value with the given natural log.
    pub fn from_log(log_abs: f64) -> Self {
        LogReal { sign: 1, log_abs }
    }

    pub fn from_f64(v: f64) -> Self {
        match v.partial_cmp(&0.0) {
            Some(Ordering::Greater) => LogReal { sign: 1, log_abs: v.ln() },
            Some(Ordering::Less) => LogReal { sign: -1, log_abs: (-v).ln() },
            _ => LogReal::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn is_finite(&self) -> bool {
        self.sign == 0 || self.log_abs.is_finite()
    }

    /// Natural log of a positive value. Panics in debug builds for non-positive values.
    pub fn ln(&self) -> f64 {
        debug_assert!(self.sign > 0, "log of non-positive LogReal");
        self.log_abs
    }

    pub fn to_f64(&self) -> f64 {
        f64::from(self.sign) * self.log_abs.exp()
    }

    pub fn abs(&self) -> Self {
        LogReal { sign: self.sign.abs(), log_abs: self.log_abs }
    }

    pub fn powi(&self, k: i64) -> Self {
        if k == 0 {
            return LogReal::one();
        }
        if self.sign == 0 {
            return LogReal::zero();
        }
        let sign = if self.sign < 0 && k % 2 != 0 { -1 } else { 1 };
        LogReal { sign, log_abs: self.log_abs * k as f64 }
    }

    /// Relative difference `|a - b| / max(|a|, |b|)` computed in log space.
    pub fn rel_diff(&self, other: &LogReal) -> f64 {
        if self.sign != other.sign {
            return if self.is_zero() && other.is_zero() { 0.0 } else { f64::INFINITY };
        }
        if self.is_zero() {
            return 0.0;
        }
        let delta = (self.log_abs - other.log_abs).abs();
        -f64::exp_m1(-delta)
    }
}

impl Mul for LogReal {
    type Output = LogReal;
    fn mul(self, rhs: LogReal) -> LogReal {
        if self.sign == 0 || rhs.sign == 0 {
            return LogReal::zero();
        }
        LogReal { sign: self.sign * rhs.sign, log_abs: self.log_abs + rhs.log_abs }
    }
}

impl Div for LogReal {
    type Output = LogReal;
    fn div(self, rhs: LogReal) -> LogReal {
        assert!(rhs.sign != 0, "LogReal division by zero");
        if self.sign == 0 {
            return LogReal::zero();
        }
        LogReal { sign: self.sign * rhs.sign, log_abs: self.log_abs - rhs.log_abs }
    }
}

impl Neg for LogReal {
    type Output = LogReal;
    fn neg(self) -> LogReal {
        LogReal { sign: -self.sign, log_abs: self.log_abs }
    }
}

impl Add for LogReal {
    type Output = LogReal;
    fn add(self, rhs: LogReal) -> LogReal {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        let (big, small) = if self.log_abs >= rhs.log_abs { (self, rhs) } else { (rhs, self) };
        let delta = small.log_abs - big.log_abs;
        if big.sign == small.sign {
            LogReal { sign: big.sign, log_abs: big.log_abs + delta.exp().ln_1p() }
        } else if delta == 0.0 {
            LogReal::zero()
        } else {
            LogReal { sign: big.sign, log_abs: big.log_abs + (-delta.exp()).ln_1p() }
        }
    }
}

impl Sub for LogReal {
    type Output = LogReal;
    fn sub(self, rhs: LogReal) -> LogReal {
        self + (-rhs)
    }
}

/// Natural log of a big unsigned integer (`-inf` for zero).
pub fn ln_biguint(v: &BigUint) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_u64().expect("64 significant bits");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a nonzero big rational's absolute value.
pub fn ln_abs_rational(v: &BigRational) -> f64 {
    let num = v.numer().abs().to_biguint().expect("nonnegative");
    let den = v.denom().abs().to_biguint().expect("nonnegative");
    ln_biguint(&num) - ln_biguint(&den)
}

pub fn rational_to_f64(v: &BigRational) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let sign = if v.is_negative() { -1.0 } else { 1.0 };
    if let (Some(n), Some(d)) = (v.numer().to_f64(), v.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    sign * ln_abs_rational(v).exp()
}

pub fn factorial_big(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// Exact binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= BigUint::from(n - i);
        acc /= BigUint::from(i + 1);
    }
    acc
}

/// `C(n, k)` as a u128 when it fits.
pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) is exact at every step
        let num = acc.checked_mul(u128::from(n - i))?;
        acc = num / u128::from(i + 1);
    }
    Some(acc)
}

/// `ln n!`, exact below [`EXACT_LOG_THRESHOLD`] and via log-gamma above.
pub fn ln_factorial(n: u64) -> f64 {
    if n <= EXACT_LOG_THRESHOLD {
        ln_biguint(&factorial_big(n))
    } else {
        statrs::function::gamma::ln_gamma(n as f64 + 1.0)
    }
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    if n <= EXACT_LOG_THRESHOLD {
        ln_biguint(&binomial_big(n, k))
    } else {
        let g = statrs::function::gamma::ln_gamma;
        g(n as f64 + 1.0) - g(k as f64 + 1.0) - g((n - k) as f64 + 1.0)
    }
}

/// Integer power with overflow check.
pub fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

pub fn big_rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// `x ln x` with the convention `0 ln 0 = 0`.
pub fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}
