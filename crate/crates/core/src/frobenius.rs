//! Frobenius lifts `sigma(t) = u t^q` with `u = 1 mod p`, acting on
//! truncated series by substitution. Coefficients are fixed (`K = Q_p`).

use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::padic::PAdicScalar;
use crate::series::{RingTag, TruncatedSeries};

#[derive(Default)]
struct PowerCache {
    /// `u^0, u^1, ...`
    pos: Vec<TruncatedSeries>,
    /// `u^-1, u^-2, ...`
    neg: Vec<TruncatedSeries>,
}

#[derive(Clone)]
pub struct FrobeniusLift {
    q: u64,
    u: TruncatedSeries,
    // Memoized powers of u; shared between clones, never observable.
    cache: Arc<Mutex<PowerCache>>,
}

impl FrobeniusLift {
    pub fn new(q: u64, u: TruncatedSeries) -> Result<Self> {
        let p = u.p() as u64;
        let mut k = q;
        while k > 1 && k.is_multiple_of(p) {
            k /= p;
        }
        if q < p || k != 1 {
            return Err(Error::InvalidInput(format!("q = {q} is not a positive power of p = {p}")));
        }
        let u = u.retag(RingTag::Plus)?;
        let Some(u0) = u.constant_term() else {
            return Err(Error::InvalidInput("u has an empty window".into()));
        };
        let diff = &u0 - &PAdicScalar::one(u.p());
        let ok = diff.is_zero_within_precision() || diff.valuation().is_some_and(|v| v >= 1);
        if !ok {
            return Err(Error::InvalidInput(format!("u(0) = {u0} is not congruent to 1 mod p")));
        }
        Ok(FrobeniusLift { q, u, cache: Arc::default() })
    }

    /// `sigma(t) = t^q`, with `u = 1` known up to `t^window`.
    pub fn standard(p: u32, q: u64, window: i64) -> Result<Self> {
        Self::new(q, TruncatedSeries::one(p, RingTag::Plus, window))
    }

    pub fn p(&self) -> u32 {
        self.u.p()
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn u(&self) -> &TruncatedSeries {
        &self.u
    }

    fn qi(&self) -> i64 {
        self.q as i64
    }

    fn with_power<R>(&self, k: i64, f: impl FnOnce(&TruncatedSeries) -> R) -> Result<R> {
        let mut cache = self.cache.lock().unwrap_or_else(|e| e.into_inner());
        if k >= 0 {
            let k = k as usize;
            if cache.pos.is_empty() {
                cache.pos.push(TruncatedSeries::one(self.p(), RingTag::Plus, self.u.hi()));
            }
            while cache.pos.len() <= k {
                let next = cache.pos.last().unwrap().mul(&self.u)?;
                cache.pos.push(next);
            }
            Ok(f(&cache.pos[k]))
        } else {
            let k = (-k) as usize;
            if cache.neg.is_empty() {
                let inv = self.u.invert_unit()?;
                cache.neg.push(inv);
            }
            while cache.neg.len() < k {
                let next = cache.neg.last().unwrap().mul(&cache.neg[0])?;
                cache.neg.push(next);
            }
            Ok(f(&cache.neg[k - 1]))
        }
    }

    /// `f(sigma(t))`.
    pub fn apply(&self, f: &TruncatedSeries) -> Result<TruncatedSeries> {
        if f.p() != self.p() {
            return Err(Error::PrimeMismatch(self.p(), f.p()));
        }
        let q = self.qi();
        let lo = if f.ring() == RingTag::Plus { 0 } else { q * f.lo() };
        let slo = f.support_lo();
        let top = q * (f.hi() + 1) - 1;
        if slo > f.hi() {
            return Ok(TruncatedSeries::zero(self.p(), f.ring(), lo, top));
        }
        let hi = top.min(q * slo + self.u.hi());
        if hi < lo {
            return Err(Error::TruncationInsufficient(format!("sigma of a series starting at t^{slo} needs u beyond t^{}", self.u.hi())));
        }
        let mut out = vec![PAdicScalar::zero(self.p()); (hi - lo + 1) as usize];
        for (i, a) in f.terms() {
            let base = q * i;
            if base > hi {
                break;
            }
            self.with_power(i, |ui| {
                for k in 0..=(hi - base).min(ui.hi()) {
                    let c = ui.coeff(k).unwrap();
                    if c.is_exact_zero() {
                        continue;
                    }
                    let slot = &mut out[(base + k - lo) as usize];
                    *slot = &*slot + &(a * &c);
                }
            })?;
        }
        TruncatedSeries::new(self.p(), f.ring(), lo, hi, out)
    }

    /// `sigma(t) = u t^q`.
    pub fn sigma_t(&self) -> TruncatedSeries {
        self.u.shift(self.qi()).expect("shifting a power series up stays in S_K")
    }

    /// `d/dt sigma(t)`.
    pub fn sigma_t_derivative(&self) -> TruncatedSeries {
        self.sigma_t().derive()
    }

    /// `delta_t(sigma(t)) / sigma(t) = q + t u'/u`, congruent to `q` mod `t`.
    pub fn log_factor(&self) -> TruncatedSeries {
        let ratio =
            self.u.derive().mul(&self.u.invert_unit().expect("u is a unit")).and_then(|r| r.shift(1)).expect("u'/u is a power series");
        let q = TruncatedSeries::constant(self.p(), RingTag::Plus, PAdicScalar::from_int(self.p(), self.qi()), ratio.hi());
        q.add(&ratio).expect("same prime")
    }
}

impl PartialEq for FrobeniusLift {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.u == other.u
    }
}

impl fmt::Debug for FrobeniusLift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FrobeniusLift").field("q", &self.q).field("u", &self.u).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plus(p: u32, values: &[i64], hi: i64) -> TruncatedSeries {
        TruncatedSeries::from_ints(p, RingTag::Plus, 0, values, hi).unwrap()
    }

    #[test]
    fn rejects_bad_lifts() {
        assert!(FrobeniusLift::new(6, plus(3, &[1], 5)).is_err());
        assert!(FrobeniusLift::new(3, plus(3, &[2], 5)).is_err());
        assert!(FrobeniusLift::new(9, plus(3, &[4, 1], 5)).is_ok());
    }

    #[test]
    fn monomials_scale_exponent_by_q() {
        let s = FrobeniusLift::standard(3, 3, 30).unwrap();
        let t2 = plus(3, &[0, 0, 1], 4);
        let img = s.apply(&t2).unwrap();
        assert_eq!(img.hi(), 14);
        assert_eq!(img.terms().map(|(e, _)| e).collect::<Vec<_>>(), vec![6]);
    }

    #[test]
    fn constants_are_fixed() {
        let s = FrobeniusLift::new(5, plus(5, &[1, 5, 10], 20)).unwrap();
        let c = TruncatedSeries::constant(5, RingTag::Plus, PAdicScalar::from_ratio(5, 2, 3), 6);
        let img = s.apply(&c).unwrap();
        assert!(img.eq_within_precision(&TruncatedSeries::constant(5, RingTag::Plus, PAdicScalar::from_ratio(5, 2, 3), 34)));
    }

    #[test]
    fn negative_powers_use_inverse_of_u() {
        let s = FrobeniusLift::new(2, plus(2, &[1, 2], 20)).unwrap();
        let tinv = TruncatedSeries::from_ints(2, RingTag::Laurent, -1, &[1], 8).unwrap();
        let img = s.apply(&tinv).unwrap();
        // sigma(t^-1) * sigma(t) = 1
        let prod = img.mul(&s.sigma_t()).unwrap();
        assert!(prod.eq_within_precision(&TruncatedSeries::one(2, RingTag::Laurent, 10)));
        assert!(prod.hi() >= 10);
    }

    #[test]
    fn ring_homomorphism_on_a_product() {
        let s = FrobeniusLift::new(3, plus(3, &[1, 3, 0, 6], 40)).unwrap();
        let f = plus(3, &[2, 1, -1], 10);
        let g = plus(3, &[1, 0, 4, 1], 10);
        let lhs = s.apply(&f.mul(&g).unwrap()).unwrap();
        let rhs = s.apply(&f).unwrap().mul(&s.apply(&g).unwrap()).unwrap();
        assert!(lhs.eq_within_precision(&rhs));
    }

    #[test]
    fn log_factor_is_q_mod_t() {
        let s = FrobeniusLift::new(5, plus(5, &[1, 5, 25], 12)).unwrap();
        let lf = s.log_factor();
        assert_eq!(lf.coeff(0).unwrap(), PAdicScalar::from_int(5, 5));
        // delta_t(sigma t) = lf * sigma t
        let lhs = s.sigma_t().log_derive();
        let rhs = lf.mul(&s.sigma_t()).unwrap();
        assert!(lhs.eq_within_precision(&rhs));
    }
}
