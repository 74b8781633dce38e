//! Truncated power and Laurent series over Q_p.
//!
//! A series stores the coefficients on a closed window `[lo, hi]`.
//! Coefficients below `lo` are exactly zero; coefficients above `hi` are
//! unknown and never assumed to vanish. `Plus` series model `S_K` and always
//! have `lo = 0`; `Laurent` series model the bounded Robba ring with a finite
//! principal part.
//!
//! An empty window (`hi = lo - 1`) is allowed and means nothing is known.

use std::cmp::{max, min};
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{int_valuation, PAdicScalar, Precision, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RingTag {
    #[serde(rename = "PLUS")]
    Plus,
    #[serde(rename = "LAURENT")]
    Laurent,
}

impl RingTag {
    /// Smallest ring containing both.
    pub fn join(self, other: RingTag) -> RingTag {
        if self == RingTag::Plus && other == RingTag::Plus {
            RingTag::Plus
        } else {
            RingTag::Laurent
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Mul,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    p: u32,
    ring: RingTag,
    lo: i64,
    hi: i64,
    coeffs: Vec<PAdicScalar>,
}

/// Result of term-by-term integration.
#[derive(Clone, Debug, PartialEq)]
pub struct Antiderivative {
    pub series: TruncatedSeries,
    /// `(exponent, v_p(exponent))` for every output exponent whose
    /// coefficient was divided by a multiple of `p`.
    pub precision_loss: Vec<(i64, i64)>,
}

impl TruncatedSeries {
    pub fn new(p: u32, ring: RingTag, lo: i64, hi: i64, coeffs: Vec<PAdicScalar>) -> Result<Self> {
        if hi < lo - 1 {
            return Err(Error::InvalidInput(format!("window [{lo}, {hi}] is inverted")));
        }
        if coeffs.len() as i64 != hi - lo + 1 {
            return Err(Error::InvalidInput(format!("window [{lo}, {hi}] needs {} coefficients, got {}", hi - lo + 1, coeffs.len())));
        }
        if let Some(c) = coeffs.iter().find(|c| c.p() != p) {
            return Err(Error::PrimeMismatch(p, c.p()));
        }
        let mut s = TruncatedSeries { p, ring, lo, hi, coeffs };
        if ring == RingTag::Plus {
            s = s.normalize_plus()?;
        }
        Ok(s)
    }

    /// Bring a `Plus` series to `lo = 0`, padding or dropping vanishing terms.
    fn normalize_plus(mut self) -> Result<Self> {
        if self.lo > 0 {
            let mut coeffs = vec![PAdicScalar::zero(self.p); self.lo as usize];
            coeffs.append(&mut self.coeffs);
            self.coeffs = coeffs;
            self.lo = 0;
        } else if self.lo < 0 {
            let drop = min(-self.lo, self.coeffs.len() as i64) as usize;
            if let Some(i) = self.coeffs[..drop].iter().position(|c| !c.is_zero_within_precision()) {
                return Err(Error::RingMismatch(format!("power series has nonzero coefficient at t^{}", self.lo + i as i64)));
            }
            self.coeffs.drain(..drop);
            self.lo = 0;
            if self.hi < -1 {
                self.hi = -1;
            }
        }
        Ok(self)
    }

    pub fn zero(p: u32, ring: RingTag, lo: i64, hi: i64) -> Self {
        let lo = if ring == RingTag::Plus { 0 } else { lo };
        let len = max(hi - lo + 1, 0) as usize;
        TruncatedSeries { p, ring, lo, hi: max(hi, lo - 1), coeffs: vec![PAdicScalar::zero(p); len] }
    }

    pub fn constant(p: u32, ring: RingTag, c: PAdicScalar, hi: i64) -> Self {
        let mut s = Self::zero(p, ring, 0, hi);
        if hi >= 0 {
            s.coeffs[0] = c;
        }
        s
    }

    pub fn one(p: u32, ring: RingTag, hi: i64) -> Self {
        Self::constant(p, ring, PAdicScalar::one(p), hi)
    }

    /// `c * t^e` known on `[lo, hi]`.
    pub fn monomial(p: u32, ring: RingTag, c: PAdicScalar, e: i64, lo: i64, hi: i64) -> Result<Self> {
        if e < lo || e > hi {
            return Err(Error::InvalidInput(format!("exponent {e} outside window [{lo}, {hi}]")));
        }
        let mut coeffs = vec![PAdicScalar::zero(p); (hi - lo + 1) as usize];
        coeffs[(e - lo) as usize] = c;
        Self::new(p, ring, lo, hi, coeffs)
    }

    /// Exact integer coefficients starting at exponent `lo`, known up to `hi`.
    pub fn from_ints(p: u32, ring: RingTag, lo: i64, values: &[i64], hi: i64) -> Result<Self> {
        if (values.len() as i64) > hi - lo + 1 {
            return Err(Error::InvalidInput("more coefficients than the window holds".into()));
        }
        let mut coeffs: Vec<PAdicScalar> = values.iter().map(|&v| PAdicScalar::from_int(p, v)).collect();
        coeffs.resize((hi - lo + 1) as usize, PAdicScalar::zero(p));
        Self::new(p, ring, lo, hi, coeffs)
    }

    /// Sparse terms on the window `[lo, hi]`; unlisted coefficients are exact zeros.
    pub fn from_terms(p: u32, ring: RingTag, lo: i64, hi: i64, terms: Vec<(i64, PAdicScalar)>) -> Result<Self> {
        let mut coeffs = vec![PAdicScalar::zero(p); max(hi - lo + 1, 0) as usize];
        for (e, c) in terms {
            if e < lo || e > hi {
                return Err(Error::InvalidInput(format!("exponent {e} outside window [{lo}, {hi}]")));
            }
            coeffs[(e - lo) as usize] = c;
        }
        Self::new(p, ring, lo, hi, coeffs)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn ring(&self) -> RingTag {
        self.ring
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Order of truncation: coefficients above this are unknown.
    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn is_empty_window(&self) -> bool {
        self.hi < self.lo
    }

    /// Coefficient at `e`: exact zero below the window, `None` above it.
    pub fn coeff(&self, e: i64) -> Option<PAdicScalar> {
        if e > self.hi {
            None
        } else if e < self.lo {
            Some(PAdicScalar::zero(self.p))
        } else {
            Some(self.coeffs[(e - self.lo) as usize].clone())
        }
    }

    fn at(&self, e: i64) -> &PAdicScalar {
        &self.coeffs[(e - self.lo) as usize]
    }

    pub fn coeffs(&self) -> &[PAdicScalar] {
        &self.coeffs
    }

    /// `(exponent, coefficient)` pairs on the window, skipping exact zeros.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &PAdicScalar)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_exact_zero()).map(|(i, c)| (self.lo + i as i64, c))
    }

    /// First exponent whose coefficient is not an exact zero (`hi + 1` if none).
    pub fn support_lo(&self) -> i64 {
        self.coeffs.iter().position(|c| !c.is_exact_zero()).map_or(self.hi + 1, |i| self.lo + i as i64)
    }

    /// t-adic valuation: `None` when unknown (every known coefficient
    /// vanishes, or the first non-exact coefficient is only known to be
    /// small).
    pub fn valuation(&self) -> Option<i64> {
        let s = self.support_lo();
        if s > self.hi || !self.at(s).is_certainly_nonzero() {
            None
        } else {
            Some(s)
        }
    }

    pub fn min_precision(&self) -> Precision {
        self.coeffs.iter().map(PAdicScalar::precision).min().unwrap_or(Precision::Exact)
    }

    pub fn is_exact(&self) -> bool {
        self.min_precision().is_exact()
    }

    pub fn is_zero_within_precision(&self) -> bool {
        self.coeffs.iter().all(PAdicScalar::is_zero_within_precision)
    }

    pub fn constant_term(&self) -> Option<PAdicScalar> {
        self.coeff(0)
    }

    fn check_prime(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            Err(Error::PrimeMismatch(self.p, other.p))
        } else {
            Ok(())
        }
    }

    fn build(p: u32, ring: RingTag, lo: i64, hi: i64, coeffs: Vec<PAdicScalar>) -> Self {
        debug_assert_eq!(coeffs.len() as i64, hi - lo + 1);
        TruncatedSeries { p, ring, lo, hi, coeffs }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        let ring = self.ring.join(other.ring);
        let lo = min(self.lo, other.lo);
        let hi = min(self.hi, other.hi);
        let coeffs = (lo..=hi).map(|e| &self.coeff(e).unwrap() + &other.coeff(e).unwrap()).collect();
        Ok(Self::build(self.p, ring, lo, hi, coeffs))
    }

    pub fn neg(&self) -> Self {
        Self::build(self.p, self.ring, self.lo, self.hi, self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &PAdicScalar) -> Self {
        Self::build(self.p, self.ring, self.lo, self.hi, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn scale_int(&self, n: i64) -> Self {
        Self::build(self.p, self.ring, self.lo, self.hi, self.coeffs.iter().map(|a| a.scale_int(n)).collect())
    }

    /// Product. The result window ends where an unknown coefficient of
    /// either factor could first contribute.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        let ring = self.ring.join(other.ring);
        let (sa, sb) = (self.support_lo(), other.support_lo());
        let lo = self.lo + other.lo;
        let hi = min(self.hi + sb, other.hi + sa);
        if hi < lo {
            return Err(Error::TruncationInsufficient(format!(
                "product of windows [{}, {}] and [{}, {}] determines no coefficient",
                self.lo, self.hi, other.lo, other.hi
            )));
        }
        let mut coeffs = vec![PAdicScalar::zero(self.p); (hi - lo + 1) as usize];
        for i in sa..=self.hi {
            let a = self.at(i);
            if a.is_exact_zero() {
                continue;
            }
            let jmax = min(other.hi, hi - i);
            for j in sb..=jmax {
                let b = other.at(j);
                if b.is_exact_zero() {
                    continue;
                }
                let slot = &mut coeffs[(i + j - lo) as usize];
                *slot = &*slot + &(a * b);
            }
        }
        Ok(Self::build(self.p, ring, lo, hi, coeffs))
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: i64) -> Result<Self> {
        Self::new(self.p, self.ring, self.lo + k, self.hi + k, self.coeffs.clone())
    }

    /// Forget coefficients above `hi`.
    pub fn truncate(&self, hi: i64) -> Self {
        if hi >= self.hi {
            return self.clone();
        }
        let hi = max(hi, self.lo - 1);
        Self::build(self.p, self.ring, self.lo, hi, self.coeffs[..(hi - self.lo + 1) as usize].to_vec())
    }

    /// Coefficients on `[lo, hi]`, which must be known.
    pub fn window_values(&self, lo: i64, hi: i64) -> Option<Vec<PAdicScalar>> {
        (lo..=hi).map(|e| self.coeff(e)).collect()
    }

    pub fn retag(&self, ring: RingTag) -> Result<Self> {
        Self::new(self.p, ring, self.lo, self.hi, self.coeffs.clone())
    }

    /// Ordinary derivation `d/dt`; the window moves down by one.
    pub fn derive(&self) -> Self {
        let lo = if self.ring == RingTag::Plus { 0 } else { self.lo - 1 };
        let hi = self.hi - 1;
        let coeffs = (lo..=hi).map(|e| self.coeff(e + 1).unwrap().scale_int(e + 1)).collect();
        Self::build(self.p, self.ring, lo, max(hi, lo - 1), coeffs)
    }

    /// Logarithmic derivation `t d/dt`; the window is preserved.
    pub fn log_derive(&self) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(i, c)| c.scale_int(self.lo + i as i64)).collect();
        Self::build(self.p, self.ring, self.lo, self.hi, coeffs)
    }

    /// Term-by-term integration with zero constant of integration.
    pub fn antiderivative(&self) -> Result<Antiderivative> {
        if let Some(r) = self.coeff(-1) {
            if !r.is_zero_within_precision() {
                return Err(Error::Obstruction { residue: r.to_string() });
            }
        }
        let lo = if self.ring == RingTag::Plus { 0 } else { self.lo + 1 };
        let hi = self.hi + 1;
        let mut loss = Vec::new();
        let coeffs = (lo..=hi)
            .map(|e| {
                if e == 0 {
                    return PAdicScalar::zero(self.p);
                }
                let v = int_valuation(&BigInt::from(e), self.p);
                if v > 0 {
                    loss.push((e, v));
                }
                self.coeff(e - 1).unwrap().div_int(e)
            })
            .collect();
        Ok(Antiderivative { series: Self::build(self.p, self.ring, lo, hi, coeffs), precision_loss: loss })
    }

    /// Multiplicative inverse. A power series must have nonzero constant
    /// term; a Laurent series is written `t^v g` with `g(0) != 0`.
    pub fn invert_unit(&self) -> Result<Self> {
        let v = self.support_lo();
        if v > self.hi {
            return Err(Error::NotAUnit("series vanishes on its known window".into()));
        }
        let lead = self.at(v);
        if !lead.is_certainly_nonzero() {
            return Err(Error::NotAUnit(format!("leading coefficient at t^{v} is zero within precision")));
        }
        if self.ring == RingTag::Plus && v != 0 {
            return Err(Error::NotAUnit(format!("power series with t-adic valuation {v}")));
        }
        let n = (self.hi - v) as usize;
        let g: Vec<&PAdicScalar> = (v..=self.hi).map(|e| self.at(e)).collect();
        let b0 = lead.inverse()?;
        let neg_b0 = -&b0;
        let mut b: Vec<PAdicScalar> = Vec::with_capacity(n + 1);
        b.push(b0);
        for k in 1..=n {
            let mut acc = PAdicScalar::zero(self.p);
            for i in 1..=k {
                if g[i].is_exact_zero() || b[k - i].is_exact_zero() {
                    continue;
                }
                acc = &acc + &(g[i] * &b[k - i]);
            }
            b.push(&acc * &neg_b0);
        }
        Ok(Self::build(self.p, self.ring, -v, self.hi - 2 * v, b))
    }

    /// Window on which two series can be compared: from the lower of the
    /// two starts (below each start the coefficients are exact zeros) to
    /// the lower of the two truncation orders.
    pub fn common_window(&self, other: &Self) -> (i64, i64) {
        (min(self.lo, other.lo), min(self.hi, other.hi))
    }

    /// First exponent on the common window where the coefficients are not
    /// congruent at the smaller precision.
    pub fn first_mismatch(&self, other: &Self) -> Option<i64> {
        let (lo, hi) = self.common_window(other);
        (lo..=hi).find(|&e| !self.coeff(e).unwrap().congruent(&other.coeff(e).unwrap()))
    }

    /// Equality in the truncated model: coefficientwise congruence at the
    /// smaller precision, on the common window.
    pub fn eq_within_precision(&self, other: &Self) -> bool {
        self.p == other.p && self.first_mismatch(other).is_none()
    }

    /// Coefficient values on the window (precision dropped).
    pub fn values(&self) -> Vec<Q> {
        self.coeffs.iter().map(|c| c.value().clone()).collect()
    }
}

/// The ring operations of `S_K` and the bounded Robba ring.
pub fn ring_arith(a: &TruncatedSeries, b: &TruncatedSeries, op: RingOp) -> Result<TruncatedSeries> {
    match op {
        RingOp::Add => a.add(b),
        RingOp::Mul => a.mul(b),
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match e {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{e}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.hi + 1)
    }
}
