//! JSON wire formats.
//!
//! Integers that fit in `i64` are written as JSON numbers, larger ones as
//! decimal strings. Rationals are a number or a string `"n/d"`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frobenius::FrobeniusLift;
use crate::linalg::QMatrix;
use crate::padic::{PAdicScalar, Precision, Q};
use crate::phinabla::{BaseRing, LogPhiNablaModule, PhiNablaModule};
use crate::series::{RingTag, TruncatedSeries};
use crate::smatrix::SeriesMatrix;

/// Embedded in every report.
pub const SCHEMA_VERSION: &str = concat!("frobmod/", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Int {
    Small(i64),
    Big(String),
}

impl From<&BigInt> for Int {
    fn from(n: &BigInt) -> Self {
        match n.to_i64() {
            Some(k) => Int::Small(k),
            None => Int::Big(n.to_string()),
        }
    }
}

impl TryFrom<&Int> for BigInt {
    type Error = Error;

    fn try_from(n: &Int) -> Result<Self> {
        match n {
            Int::Small(k) => Ok(BigInt::from(*k)),
            Int::Big(s) => BigInt::from_str(s).map_err(|_| Error::InvalidInput(format!("not an integer: {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rational {
    Int(i64),
    Text(String),
}

impl From<&Q> for Rational {
    fn from(x: &Q) -> Self {
        if x.denom().is_one() {
            if let Some(k) = x.numer().to_i64() {
                return Rational::Int(k);
            }
            return Rational::Text(x.numer().to_string());
        }
        Rational::Text(format!("{}/{}", x.numer(), x.denom()))
    }
}

impl TryFrom<&Rational> for Q {
    type Error = Error;

    fn try_from(r: &Rational) -> Result<Self> {
        match r {
            Rational::Int(k) => Ok(Q::from_integer(BigInt::from(*k))),
            Rational::Text(s) => {
                let bad = || Error::InvalidInput(format!("not a rational: {s:?}"));
                let (n, d) = match s.split_once('/') {
                    Some((n, d)) => (n.trim(), d.trim()),
                    None => (s.trim(), "1"),
                };
                let n = BigInt::from_str(n).map_err(|_| bad())?;
                let d = BigInt::from_str(d).map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(Q::new(n, d))
            }
        }
    }
}

pub fn matrix_to_wire(m: &QMatrix) -> Vec<Vec<Rational>> {
    m.to_rows().iter().map(|row| row.iter().map(Rational::from).collect()).collect()
}

pub fn matrix_from_wire(rows: &[Vec<Rational>], dim: usize, name: &str) -> Result<QMatrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch(format!("{name} must be {dim}x{dim}")));
    }
    let rows = rows.iter().map(|r| r.iter().map(Q::try_from).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
    Ok(QMatrix::from_rows(rows))
}

/// `{p, ringTag, lo, hi, coeffs: [[exponent, num, den, precision]]}`.
/// Exact zero coefficients are omitted; precision `-1` means exact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesWire {
    pub p: u32,
    #[serde(rename = "ringTag")]
    pub ring_tag: RingTag,
    pub lo: i64,
    pub hi: i64,
    pub coeffs: Vec<(i64, Int, Int, i64)>,
}

impl From<&TruncatedSeries> for SeriesWire {
    fn from(s: &TruncatedSeries) -> Self {
        let coeffs =
            s.terms().map(|(e, c)| (e, Int::from(c.value().numer()), Int::from(c.value().denom()), c.precision().to_code())).collect();
        SeriesWire { p: s.p(), ring_tag: s.ring(), lo: s.lo(), hi: s.hi(), coeffs }
    }
}

impl TryFrom<&SeriesWire> for TruncatedSeries {
    type Error = Error;

    fn try_from(w: &SeriesWire) -> Result<Self> {
        if !crate::padic::is_prime(w.p) {
            return Err(Error::InvalidInput(format!("p = {} is not prime", w.p)));
        }
        let mut terms = Vec::with_capacity(w.coeffs.len());
        for (e, n, d, prec) in &w.coeffs {
            let d = BigInt::try_from(d)?;
            if d.is_zero() {
                return Err(Error::InvalidInput(format!("zero denominator at t^{e}")));
            }
            let value = Q::new(BigInt::try_from(n)?, d);
            terms.push((*e, PAdicScalar::new(w.p, value, Precision::from_code(*prec))));
        }
        TruncatedSeries::from_terms(w.p, w.ring_tag, w.lo, w.hi, terms)
    }
}

fn smatrix_to_wire(m: &SeriesMatrix) -> Vec<Vec<SeriesWire>> {
    m.to_rows().iter().map(|r| r.iter().map(SeriesWire::from).collect()).collect()
}

fn smatrix_from_wire(rows: &[Vec<SeriesWire>], rank: usize, name: &str) -> Result<SeriesMatrix> {
    if rows.len() != rank || rows.iter().any(|r| r.len() != rank) {
        return Err(Error::DimensionMismatch(format!("{name} must be {rank}x{rank}")));
    }
    let rows = rows.iter().map(|r| r.iter().map(TruncatedSeries::try_from).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
    SeriesMatrix::from_rows(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrobWire {
    pub q: u64,
    pub u: SeriesWire,
}

impl From<&FrobeniusLift> for FrobWire {
    fn from(f: &FrobeniusLift) -> Self {
        FrobWire { q: f.q(), u: SeriesWire::from(f.u()) }
    }
}

impl TryFrom<&FrobWire> for FrobeniusLift {
    type Error = Error;

    fn try_from(w: &FrobWire) -> Result<Self> {
        FrobeniusLift::new(w.q, TruncatedSeries::try_from(&w.u)?)
    }
}

/// `{rank, ring, frob: {q, u}, G, A, log, flagBasis?}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuleWire {
    pub rank: usize,
    pub ring: BaseRing,
    pub frob: FrobWire,
    #[serde(rename = "G")]
    pub g: Vec<Vec<SeriesWire>>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<SeriesWire>>,
    pub log: bool,
    #[serde(rename = "flagBasis", default, skip_serializing_if = "Option::is_none")]
    pub flag_basis: Option<Vec<Vec<SeriesWire>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AnyModule {
    Plain(PhiNablaModule),
    Log(LogPhiNablaModule),
}

impl From<&PhiNablaModule> for ModuleWire {
    fn from(m: &PhiNablaModule) -> Self {
        ModuleWire {
            rank: m.rank(),
            ring: m.ring(),
            frob: FrobWire::from(m.frob()),
            g: smatrix_to_wire(m.connection()),
            a: smatrix_to_wire(m.frobenius_matrix()),
            log: false,
            flag_basis: m.flag_basis().map(smatrix_to_wire),
        }
    }
}

impl From<&LogPhiNablaModule> for ModuleWire {
    fn from(m: &LogPhiNablaModule) -> Self {
        ModuleWire {
            rank: m.rank(),
            ring: BaseRing::SK,
            frob: FrobWire::from(m.frob()),
            g: smatrix_to_wire(m.connection()),
            a: smatrix_to_wire(m.frobenius_matrix()),
            log: true,
            flag_basis: m.flag_basis().map(smatrix_to_wire),
        }
    }
}

impl From<&AnyModule> for ModuleWire {
    fn from(m: &AnyModule) -> Self {
        match m {
            AnyModule::Plain(m) => m.into(),
            AnyModule::Log(m) => m.into(),
        }
    }
}

impl TryFrom<&ModuleWire> for AnyModule {
    type Error = Error;

    fn try_from(w: &ModuleWire) -> Result<Self> {
        let frob = FrobeniusLift::try_from(&w.frob)?;
        let g = smatrix_from_wire(&w.g, w.rank, "G")?;
        let a = smatrix_from_wire(&w.a, w.rank, "A")?;
        let flag = w.flag_basis.as_ref().map(|f| smatrix_from_wire(f, w.rank, "flagBasis")).transpose()?;
        if w.log {
            if w.ring != BaseRing::SK {
                return Err(Error::RingMismatch("log modules live over S_K".into()));
            }
            let mut m = LogPhiNablaModule::new(g, a, frob)?;
            if let Some(f) = flag {
                m = m.with_flag_basis(f)?;
            }
            Ok(AnyModule::Log(m))
        } else {
            let mut m = PhiNablaModule::new(w.ring, g, a, frob)?;
            if let Some(f) = flag {
                m = m.with_flag_basis(f)?;
            }
            Ok(AnyModule::Plain(m))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qr;

    #[test]
    fn rationals_round_trip() {
        for x in [qr(3, 1), qr(-7, 4), Q::from_integer(BigInt::from(10).pow(30))] {
            let w = Rational::from(&x);
            let s = serde_json::to_string(&w).unwrap();
            let back: Rational = serde_json::from_str(&s).unwrap();
            assert_eq!(Q::try_from(&back).unwrap(), x);
        }
        assert_eq!(serde_json::to_string(&Rational::from(&qr(-7, 4))).unwrap(), "\"-7/4\"");
        assert!(Q::try_from(&Rational::Text("1/0".into())).is_err());
    }

    #[test]
    fn series_round_trip() {
        let s = TruncatedSeries::from_terms(
            5,
            RingTag::Laurent,
            -2,
            6,
            vec![
                (-2, PAdicScalar::from_ratio(5, 1, 3)),
                (0, PAdicScalar::approx_zero(5, 4)),
                (4, PAdicScalar::new(5, qr(26, 1), Precision::Abs(2))),
            ],
        )
        .unwrap();
        let json = serde_json::to_string(&SeriesWire::from(&s)).unwrap();
        assert_eq!(json, r#"{"p":5,"ringTag":"LAURENT","lo":-2,"hi":6,"coeffs":[[-2,1,3,-1],[0,0,1,4],[4,26,1,2]]}"#);
        let back = TruncatedSeries::try_from(&serde_json::from_str::<SeriesWire>(&json).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn module_round_trip() {
        let f = FrobeniusLift::standard(3, 3, 10).unwrap();
        let m = PhiNablaModule::trivial(&f, BaseRing::EDagger, 2, 6);
        let w = ModuleWire::from(&m);
        let json = serde_json::to_string(&w).unwrap();
        let back = AnyModule::try_from(&serde_json::from_str::<ModuleWire>(&json).unwrap()).unwrap();
        assert_eq!(back, AnyModule::Plain(m));
    }
}
