//! Rational numbers carrying an absolute p-adic precision.
//!
//! A [`PAdicScalar`] is an exact rational representative together with the
//! exponent `m` such that the true value is only known modulo `p^m`. The
//! representative is never reduced except that a value congruent to zero is
//! replaced by zero.

use std::cmp::min;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

/// Absolute precision. `Abs(m)` means known modulo `p^m`.
///
/// The derived order puts every finite precision below `Exact`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Precision {
    Abs(i64),
    Exact,
}

impl Precision {
    pub fn is_exact(self) -> bool {
        matches!(self, Precision::Exact)
    }

    /// Shift a finite precision by `k`; `Exact` is unchanged.
    pub fn shifted(self, k: i64) -> Precision {
        match self {
            Precision::Abs(m) => Precision::Abs(m + k),
            Precision::Exact => Precision::Exact,
        }
    }

    /// JSON encoding: `-1` for exact.
    pub fn to_code(self) -> i64 {
        match self {
            Precision::Abs(m) => m,
            Precision::Exact => -1,
        }
    }

    pub fn from_code(code: i64) -> Precision {
        if code < 0 {
            Precision::Exact
        } else {
            Precision::Abs(code)
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Abs(m) => write!(f, "O(p^{m})"),
            Precision::Exact => write!(f, "exact"),
        }
    }
}

/// p-adic valuation of a nonzero integer.
pub fn int_valuation(n: &BigInt, p: u32) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (quot, rem) = n.div_rem(&p);
        if !rem.is_zero() {
            return v;
        }
        n = quot;
        v += 1;
    }
}

/// p-adic valuation of a rational, `None` for zero.
pub fn valuation(x: &Q, p: u32) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        Some(int_valuation(x.numer(), p) - int_valuation(x.denom(), p))
    }
}

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

#[derive(Clone, Debug)]
pub struct PAdicScalar {
    p: u32,
    value: Q,
    prec: Precision,
}

impl PAdicScalar {
    pub fn new(p: u32, value: Q, prec: Precision) -> Self {
        let mut s = PAdicScalar { p, value, prec };
        s.normalize();
        s
    }

    pub fn exact(p: u32, value: Q) -> Self {
        PAdicScalar { p, value, prec: Precision::Exact }
    }

    pub fn from_int(p: u32, n: i64) -> Self {
        Self::exact(p, Q::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(p: u32, num: i64, den: i64) -> Self {
        Self::exact(p, Q::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero(p: u32) -> Self {
        Self::exact(p, Q::zero())
    }

    pub fn one(p: u32) -> Self {
        Self::exact(p, Q::one())
    }

    /// Zero known only modulo `p^m`.
    pub fn approx_zero(p: u32, m: i64) -> Self {
        PAdicScalar { p, value: Q::zero(), prec: Precision::Abs(m) }
    }

    pub fn with_precision(mut self, prec: Precision) -> Self {
        self.prec = min(self.prec, prec);
        self.normalize();
        self
    }

    fn normalize(&mut self) {
        if let Precision::Abs(m) = self.prec {
            if let Some(v) = valuation(&self.value, self.p) {
                if v >= m {
                    self.value = Q::zero();
                }
            }
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn value(&self) -> &Q {
        &self.value
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    /// Valuation of the representative (`None` when it is zero).
    pub fn valuation(&self) -> Option<i64> {
        valuation(&self.value, self.p)
    }

    /// Best lower bound on the valuation of the true value.
    fn valuation_bound(&self) -> Option<i64> {
        match (self.valuation(), self.prec) {
            (Some(v), Precision::Abs(m)) => Some(min(v, m)),
            (Some(v), Precision::Exact) => Some(v),
            (None, Precision::Abs(m)) => Some(m),
            (None, Precision::Exact) => None,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.value.is_zero() && self.prec.is_exact()
    }

    /// Zero modulo the known precision.
    pub fn is_zero_within_precision(&self) -> bool {
        self.value.is_zero()
    }

    /// Nonzero with its valuation determined.
    pub fn is_certainly_nonzero(&self) -> bool {
        !self.value.is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.valuation().is_none_or(|v| v >= 0)
    }

    /// Congruence modulo the smaller of the two precisions.
    pub fn congruent(&self, other: &PAdicScalar) -> bool {
        let diff = &self.value - &other.value;
        match min(self.prec, other.prec) {
            Precision::Exact => diff.is_zero(),
            Precision::Abs(m) => valuation(&diff, self.p).is_none_or(|v| v >= m),
        }
    }

    fn check_prime(&self, other: &PAdicScalar) {
        assert_eq!(self.p, other.p, "p-adic scalars over different primes");
    }

    pub fn try_add(&self, other: &PAdicScalar) -> Result<PAdicScalar> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        Ok(self + other)
    }

    /// Multiply by an exact integer.
    pub fn scale_int(&self, n: i64) -> PAdicScalar {
        if n == 0 {
            return PAdicScalar::zero(self.p);
        }
        let k = BigInt::from(n);
        let v = int_valuation(&k, self.p);
        PAdicScalar::new(self.p, &self.value * Q::from_integer(k), self.prec.shifted(v))
    }

    /// Divide by a nonzero exact integer; precision drops by `v_p(n)`.
    pub fn div_int(&self, n: i64) -> PAdicScalar {
        assert!(n != 0, "division by zero integer");
        let k = BigInt::from(n);
        let v = int_valuation(&k, self.p);
        PAdicScalar::new(self.p, &self.value / Q::from_integer(k), self.prec.shifted(-v))
    }

    pub fn inverse(&self) -> Result<PAdicScalar> {
        if !self.is_certainly_nonzero() {
            return Err(Error::DivisionByZero);
        }
        let prec = match self.prec {
            Precision::Exact => Precision::Exact,
            Precision::Abs(m) => Precision::Abs(m - 2 * self.valuation().unwrap()),
        };
        Ok(PAdicScalar::new(self.p, self.value.recip(), prec))
    }

    pub fn div(&self, other: &PAdicScalar) -> Result<PAdicScalar> {
        Ok(self * &other.inverse()?)
    }

    /// Relative precision: absolute precision minus valuation.
    pub fn relative_precision(&self) -> Precision {
        match (self.prec, self.valuation()) {
            (Precision::Abs(m), Some(v)) => Precision::Abs(m - v),
            (Precision::Abs(_), None) => Precision::Abs(0),
            (Precision::Exact, _) => Precision::Exact,
        }
    }
}

impl PartialEq for PAdicScalar {
    /// Structural equality: same representative and same claimed precision.
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.prec == other.prec && self.value == other.value
    }
}

impl<'a> Add<&'a PAdicScalar> for &'a PAdicScalar {
    type Output = PAdicScalar;

    fn add(self, rhs: &'a PAdicScalar) -> PAdicScalar {
        self.check_prime(rhs);
        PAdicScalar::new(self.p, &self.value + &rhs.value, min(self.prec, rhs.prec))
    }
}

impl<'a> Sub<&'a PAdicScalar> for &'a PAdicScalar {
    type Output = PAdicScalar;

    fn sub(self, rhs: &'a PAdicScalar) -> PAdicScalar {
        self.check_prime(rhs);
        PAdicScalar::new(self.p, &self.value - &rhs.value, min(self.prec, rhs.prec))
    }
}

impl Neg for &PAdicScalar {
    type Output = PAdicScalar;

    fn neg(self) -> PAdicScalar {
        PAdicScalar { p: self.p, value: -&self.value, prec: self.prec }
    }
}

impl<'a> Mul<&'a PAdicScalar> for &'a PAdicScalar {
    type Output = PAdicScalar;

    fn mul(self, rhs: &'a PAdicScalar) -> PAdicScalar {
        self.check_prime(rhs);
        if self.is_exact_zero() || rhs.is_exact_zero() {
            return PAdicScalar::zero(self.p);
        }
        let prec = match (self.prec, rhs.prec) {
            (Precision::Exact, Precision::Exact) => Precision::Exact,
            (Precision::Exact, Precision::Abs(m)) => Precision::Abs(m + self.valuation().unwrap()),
            (Precision::Abs(m), Precision::Exact) => Precision::Abs(m + rhs.valuation().unwrap()),
            (Precision::Abs(ma), Precision::Abs(mb)) => {
                let va = self.valuation_bound().unwrap();
                let vb = rhs.valuation_bound().unwrap();
                Precision::Abs(min(ma + vb, mb + va))
            }
        };
        PAdicScalar::new(self.p, &self.value * &rhs.value, prec)
    }
}

impl fmt::Display for PAdicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.prec {
            Precision::Exact => write!(f, "{}", self.value),
            Precision::Abs(m) => write!(f, "{} + O({}^{})", self.value, self.p, m),
        }
    }
}

/// The smaller of two optional valuations, treating `None` as +infinity.
pub fn min_valuation(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(min(x, y)),
        (x, None) => x,
        (None, y) => y,
    }
}
