//! Matrices of truncated series: connection and Frobenius matrices.

use std::cmp::{max, min};

use crate::error::{Error, Result};
use crate::frobenius::FrobeniusLift;
use crate::linalg::QMatrix;
use crate::padic::{PAdicScalar, Precision};
use crate::series::{RingTag, TruncatedSeries};

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesMatrix {
    rows: usize,
    cols: usize,
    p: u32,
    entries: Vec<TruncatedSeries>,
}

/// Position of a coefficient inside a series matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Location {
    pub row: usize,
    pub col: usize,
    pub exponent: i64,
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "entry ({}, {}) at t^{}", self.row, self.col, self.exponent)
    }
}

impl SeriesMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<TruncatedSeries>) -> Result<Self> {
        if entries.len() != rows * cols || entries.is_empty() {
            return Err(Error::DimensionMismatch(format!("{rows}x{cols} matrix needs {} entries, got {}", rows * cols, entries.len())));
        }
        let p = entries[0].p();
        if let Some(e) = entries.iter().find(|e| e.p() != p) {
            return Err(Error::PrimeMismatch(p, e.p()));
        }
        Ok(SeriesMatrix { rows, cols, p, entries })
    }

    pub fn from_rows(rows: Vec<Vec<TruncatedSeries>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> TruncatedSeries) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self::new(rows, cols, entries)
    }

    pub fn zero(p: u32, ring: RingTag, rows: usize, cols: usize, lo: i64, hi: i64) -> Self {
        Self::from_fn(rows, cols, |_, _| TruncatedSeries::zero(p, ring, lo, hi)).expect("nonempty")
    }

    pub fn identity(p: u32, ring: RingTag, n: usize, hi: i64) -> Self {
        Self::constant(p, ring, &QMatrix::identity(n), hi)
    }

    /// Constant matrix with exact entries, known up to `t^hi`.
    pub fn constant(p: u32, ring: RingTag, m: &QMatrix, hi: i64) -> Self {
        Self::from_fn(m.rows(), m.cols(), |i, j| TruncatedSeries::constant(p, ring, PAdicScalar::exact(p, m[(i, j)].clone()), hi))
            .expect("nonempty")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &TruncatedSeries {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, s: TruncatedSeries) {
        self.entries[i * self.cols + j] = s;
    }

    pub fn entries(&self) -> &[TruncatedSeries] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<TruncatedSeries>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).clone()).collect()).collect()
    }

    pub fn ring(&self) -> RingTag {
        self.entries.iter().fold(RingTag::Plus, |r, e| r.join(e.ring()))
    }

    pub fn min_lo(&self) -> i64 {
        self.entries.iter().map(TruncatedSeries::lo).min().unwrap()
    }

    pub fn min_support(&self) -> i64 {
        self.entries.iter().map(TruncatedSeries::support_lo).min().unwrap()
    }

    pub fn min_hi(&self) -> i64 {
        self.entries.iter().map(TruncatedSeries::hi).min().unwrap()
    }

    pub fn max_hi(&self) -> i64 {
        self.entries.iter().map(TruncatedSeries::hi).max().unwrap()
    }

    pub fn min_precision(&self) -> Precision {
        self.entries.iter().map(TruncatedSeries::min_precision).min().unwrap()
    }

    /// Identity whose window is long enough not to limit products with `self`.
    pub fn identity_like(&self, n: usize) -> Self {
        Self::identity(self.p, self.ring(), n, self.max_hi() - min(self.min_lo(), 0) + 1)
    }

    pub fn try_map(&self, f: impl Fn(&TruncatedSeries) -> Result<TruncatedSeries>) -> Result<Self> {
        let entries = self.entries.iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::new(self.rows, self.cols, entries)
    }

    pub fn map(&self, f: impl Fn(&TruncatedSeries) -> TruncatedSeries) -> Self {
        self.try_map(|s| Ok(f(s))).expect("map preserves shape")
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch(format!("{}x{} vs {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Self::new(self.rows, self.cols, entries)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.sub(b)).collect::<Result<_>>()?;
        Self::new(self.rows, self.cols, entries)
    }

    pub fn neg(&self) -> Self {
        self.map(TruncatedSeries::neg)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!("cannot multiply {}x{} by {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = self.get(i, 0).mul(other.get(0, j))?;
                for k in 1..self.cols {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j))?)?;
                }
                entries.push(acc);
            }
        }
        Self::new(self.rows, other.cols, entries)
    }

    /// Multiply every entry by the series `f`.
    pub fn scale_series(&self, f: &TruncatedSeries) -> Result<Self> {
        self.try_map(|s| f.mul(s))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone()).expect("nonempty")
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        let (r2, c2) = (other.rows, other.cols);
        let mut entries = Vec::with_capacity(self.rows * r2 * self.cols * c2);
        for i in 0..self.rows * r2 {
            for j in 0..self.cols * c2 {
                entries.push(self.get(i / r2, j / c2).mul(other.get(i % r2, j % c2))?);
            }
        }
        Self::new(self.rows * r2, self.cols * c2, entries)
    }

    /// Block diagonal sum.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let (r, c) = (self.rows + other.rows, self.cols + other.cols);
        let ring = self.ring().join(other.ring());
        let hi = max(self.max_hi(), other.max_hi()) - min(min(self.min_lo(), other.min_lo()), 0) + 1;
        Self::from_fn(r, c, |i, j| {
            if i < self.rows && j < self.cols {
                self.get(i, j).clone()
            } else if i >= self.rows && j >= self.cols {
                other.get(i - self.rows, j - self.cols).clone()
            } else {
                TruncatedSeries::zero(self.p, ring, 0, hi)
            }
        })
    }

    pub fn derive(&self) -> Self {
        self.map(TruncatedSeries::derive)
    }

    pub fn log_derive(&self) -> Self {
        self.map(TruncatedSeries::log_derive)
    }

    pub fn shift(&self, k: i64) -> Result<Self> {
        self.try_map(|s| s.shift(k))
    }

    pub fn retag(&self, ring: RingTag) -> Result<Self> {
        self.try_map(|s| s.retag(ring))
    }

    pub fn truncate(&self, hi: i64) -> Self {
        self.map(|s| s.truncate(hi))
    }

    pub fn frobenius(&self, sigma: &FrobeniusLift) -> Result<Self> {
        self.try_map(|s| sigma.apply(s))
    }

    /// Constant-term values; `None` if some entry has an empty window at 0.
    pub fn constant_term(&self) -> Option<QMatrix> {
        let mut vals = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            vals.push(e.coeff(0)?.value().clone());
        }
        Some(QMatrix::from_fn(self.rows, self.cols, |i, j| vals[i * self.cols + j].clone()))
    }

    /// Constant terms with their precisions.
    pub fn constant_scalars(&self) -> Option<Vec<PAdicScalar>> {
        self.entries.iter().map(|e| e.coeff(0)).collect()
    }

    pub fn first_mismatch(&self, other: &Self) -> Option<Location> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Some(Location { row: 0, col: 0, exponent: i64::MIN });
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                if let Some(e) = self.get(i, j).first_mismatch(other.get(i, j)) {
                    return Some(Location { row: i, col: j, exponent: e });
                }
            }
        }
        None
    }

    pub fn eq_within_precision(&self, other: &Self) -> bool {
        self.first_mismatch(other).is_none()
    }

    /// First coefficient that is not zero within precision.
    pub fn first_nonzero(&self) -> Option<Location> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let s = self.get(i, j);
                if let Some(k) = s.coeffs().iter().position(|c| !c.is_zero_within_precision()) {
                    return Some(Location { row: i, col: j, exponent: s.lo() + k as i64 });
                }
            }
        }
        None
    }

    pub fn is_zero_within_precision(&self) -> bool {
        self.first_nonzero().is_none()
    }

    /// Inverse by Gaussian elimination, pivoting on the entry of smallest
    /// t-adic valuation. Over `S_K` every pivot must be a unit.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.to_rows();
        let mut b = self.identity_like(n).to_rows();
        for c in 0..n {
            let pivot = (c..n)
                .filter_map(|r| a[r][c].valuation().map(|v| (v, r)))
                .min()
                .ok_or_else(|| Error::NotAUnit(format!("no invertible pivot in column {c}")))?
                .1;
            a.swap(c, pivot);
            b.swap(c, pivot);
            let inv = a[c][c].invert_unit()?;
            a[c] = a[c].iter().map(|s| inv.mul(s)).collect::<Result<_>>()?;
            b[c] = b[c].iter().map(|s| inv.mul(s)).collect::<Result<_>>()?;
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = a[r][c].clone();
                for j in 0..n {
                    a[r][j] = a[r][j].sub(&f.mul(&a[c][j])?)?;
                    b[r][j] = b[r][j].sub(&f.mul(&b[c][j])?)?;
                }
            }
        }
        Self::from_rows(b)
    }
}
