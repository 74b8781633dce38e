//! Finite free (phi, nabla)-modules and logarithmic (phi, nabla)-modules.
//!
//! Conventions, fixed once for the whole crate: a vector is a column `v` of
//! coordinates in the chosen basis `e_1, ..., e_r`.
//!
//! * `nabla v = d/dt v + G v`, so `nabla e_j = sum_i G_ij e_i`;
//! * `phi` sends the pullback basis vector `1 (x) e_j` to column `j` of `A`,
//!   so `phi(v) = A sigma(v)`;
//! * `nabla^log v = t d/dt v + G_log v`.
//!
//! With these conventions, `phi` being horizontal (`nabla o phi = phi~ o nabla`
//! with `phi~ = sigma'(t) phi`) is the matrix identity
//!
//! ```text
//! A' + G A = sigma'(t) A sigma(G)
//! ```
//!
//! and for log modules, with `lambda = delta_t(sigma(t)) / sigma(t)`,
//!
//! ```text
//! delta_t(A) + G_log A = lambda A sigma(G_log).
//! ```
//!
//! At `t = 0` the latter reads `N A(0) = q A(0) N` with `N = G_log(0)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frobenius::FrobeniusLift;
use crate::linalg::{q, QMatrix};
use crate::padic::{PAdicScalar, Q};
use crate::series::{RingTag, TruncatedSeries};
use crate::smatrix::{Location, SeriesMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaseRing {
    #[serde(rename = "S_K")]
    SK,
    #[serde(rename = "E_DAGGER")]
    EDagger,
}

impl BaseRing {
    pub fn tag(self) -> RingTag {
        match self {
            BaseRing::SK => RingTag::Plus,
            BaseRing::EDagger => RingTag::Laurent,
        }
    }
}

/// One checked invariant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(rename = "firstFailure", skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub(crate) fn pass(&mut self, name: &str, detail: Option<String>) {
        self.checks.push(Check { name: name.into(), passed: true, detail, first_failure: None });
    }

    pub(crate) fn fail(&mut self, name: &str, detail: String, at: Option<String>) {
        self.checks.push(Check { name: name.into(), passed: false, detail: Some(detail), first_failure: at });
    }

    pub(crate) fn record(&mut self, name: &str, outcome: Result<Option<Location>>, window: Option<(i64, i64)>) {
        let detail = window.map(|(lo, hi)| format!("checked on [{lo}, {hi}]"));
        match outcome {
            Ok(None) => self.pass(name, detail),
            Ok(Some(loc)) => self.fail(name, detail.unwrap_or_default(), Some(loc.to_string())),
            Err(e) => self.fail(name, e.to_string(), None),
        }
    }

    /// Turn a failing report into an error naming the first failure.
    pub fn into_result(self) -> Result<()> {
        match self.failures().next() {
            None => Ok(()),
            Some(c) => Err(Error::ValidationFailed(format!(
                "{}: {}{}",
                c.name,
                c.detail.clone().unwrap_or_default(),
                c.first_failure.as_ref().map(|l| format!(" ({l})")).unwrap_or_default()
            ))),
        }
    }
}

/// Compare two matrices, failing if the comparison window is empty.
fn compare(lhs: &SeriesMatrix, rhs: &SeriesMatrix) -> (Result<Option<Location>>, Option<(i64, i64)>) {
    let lo = lhs.min_lo().min(rhs.min_lo());
    let hi = lhs.min_hi().min(rhs.min_hi());
    if hi < lo {
        return (Err(Error::TruncationInsufficient("no coefficient is determined on both sides".into())), None);
    }
    (Ok(lhs.first_mismatch(rhs)), Some((lo, hi)))
}

fn strictly_upper_failure(m: &SeriesMatrix) -> Option<Location> {
    for i in 0..m.rows() {
        for j in 0..=i {
            let s = m.get(i, j);
            if let Some(k) = s.coeffs().iter().position(|c| !c.is_zero_within_precision()) {
                return Some(Location { row: i, col: j, exponent: s.lo() + k as i64 });
            }
        }
    }
    None
}

fn check_square(name: &str, m: &SeriesMatrix, rank: usize) -> Result<()> {
    if m.rows() != rank || m.cols() != rank {
        return Err(Error::DimensionMismatch(format!("{name} is {}x{}, expected {rank}x{rank}", m.rows(), m.cols())));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhiNablaModule {
    ring: BaseRing,
    connection: SeriesMatrix,
    frobenius: SeriesMatrix,
    frob: FrobeniusLift,
    flag_basis: Option<SeriesMatrix>,
    nonsingular: bool,
}

impl PhiNablaModule {
    pub fn new(ring: BaseRing, connection: SeriesMatrix, frobenius: SeriesMatrix, frob: FrobeniusLift) -> Result<Self> {
        let rank = connection.rows();
        check_square("G", &connection, rank)?;
        check_square("A", &frobenius, rank)?;
        for p in [connection.p(), frobenius.p()] {
            if p != frob.p() {
                return Err(Error::PrimeMismatch(frob.p(), p));
            }
        }
        let connection = connection.retag(ring.tag())?;
        let frobenius = frobenius.retag(ring.tag())?;
        Ok(PhiNablaModule { ring, connection, frobenius, frob, flag_basis: None, nonsingular: false })
    }

    /// Declare unipotence: `flag` is a change of basis in which the
    /// connection becomes strictly upper triangular. Checked by `validate`.
    pub fn with_flag_basis(mut self, flag: SeriesMatrix) -> Result<Self> {
        check_square("flag basis", &flag, self.rank())?;
        self.flag_basis = Some(flag.retag(self.ring.tag())?);
        Ok(self)
    }

    /// The rank-`r` unit object: `G = 0`, `A = 1`, known up to `t^window`.
    pub fn trivial(frob: &FrobeniusLift, ring: BaseRing, rank: usize, window: i64) -> Self {
        let p = frob.p();
        let g = SeriesMatrix::zero(p, ring.tag(), rank, rank, 0, window);
        let a = SeriesMatrix::identity(p, ring.tag(), rank, window);
        Self::new(ring, g, a, frob.clone()).expect("trivial module is well formed")
    }

    pub fn rank(&self) -> usize {
        self.connection.rows()
    }

    pub fn ring(&self) -> BaseRing {
        self.ring
    }

    pub fn p(&self) -> u32 {
        self.frob.p()
    }

    pub fn connection(&self) -> &SeriesMatrix {
        &self.connection
    }

    pub fn frobenius_matrix(&self) -> &SeriesMatrix {
        &self.frobenius
    }

    pub fn frob(&self) -> &FrobeniusLift {
        &self.frob
    }

    pub fn flag_basis(&self) -> Option<&SeriesMatrix> {
        self.flag_basis.as_ref()
    }

    /// Set by [`base_change`](Self::base_change): the module comes from `S_K`.
    pub fn is_marked_nonsingular(&self) -> bool {
        self.nonsingular
    }

    /// `(A' + G A, sigma'(t) A sigma(G))`.
    pub fn horizontality_sides(&self) -> Result<(SeriesMatrix, SeriesMatrix)> {
        let a = &self.frobenius;
        let lhs = a.derive().add(&self.connection.mul(a)?)?;
        let sg = self.connection.frobenius(&self.frob)?;
        let rhs = a.mul(&sg)?.scale_series(&self.frob.sigma_t_derivative())?;
        Ok((lhs, rhs))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        match self.frobenius.inverse() {
            Ok(_) => report.pass("frobenius_invertible", None),
            Err(e) => report.fail("frobenius_invertible", e.to_string(), None),
        }
        match self.horizontality_sides() {
            Ok((lhs, rhs)) => {
                let (outcome, window) = compare(&lhs, &rhs);
                report.record("horizontality", outcome, window);
            }
            Err(e) => report.fail("horizontality", e.to_string(), None),
        }
        if let Some(flag) = &self.flag_basis {
            let outcome = flag_connection(&self.connection, flag, false).map(|g| strictly_upper_failure(&g));
            report.record("unipotent_flag", outcome, None);
        }
        report
    }

    /// Change of basis `e' = e P`.
    pub fn gauge_transform(&self, p: &SeriesMatrix) -> Result<Self> {
        check_square("P", p, self.rank())?;
        let p = p.retag(self.ring.tag())?;
        let pinv = p.inverse()?;
        let g = pinv.mul(&self.connection)?.mul(&p)?.add(&pinv.mul(&p.derive())?)?;
        let a = pinv.mul(&self.frobenius)?.mul(&p.frobenius(&self.frob)?)?;
        let flag = match &self.flag_basis {
            Some(f) => Some(pinv.mul(f)?),
            None => None,
        };
        Ok(PhiNablaModule { connection: g, frobenius: a, flag_basis: flag, ..self.clone() })
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(format!("{:?} vs {:?}", self.ring, other.ring)));
        }
        if self.frob != other.frob {
            return Err(Error::InvalidInput("modules use different Frobenius lifts".into()));
        }
        Ok(())
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let i1 = other.connection.identity_like(self.rank());
        let i2 = self.connection.identity_like(other.rank());
        let g = self.connection.kron(&i2)?.add(&i1.kron(&other.connection)?)?;
        let a = self.frobenius.kron(&other.frobenius)?;
        let flag = match (&self.flag_basis, &other.flag_basis) {
            (Some(f1), Some(f2)) => Some(f1.kron(f2)?),
            _ => None,
        };
        Ok(PhiNablaModule {
            ring: self.ring,
            connection: g,
            frobenius: a,
            frob: self.frob.clone(),
            flag_basis: flag,
            nonsingular: self.nonsingular && other.nonsingular,
        })
    }

    pub fn dual(&self) -> Result<Self> {
        let g = self.connection.transpose().neg();
        let a = self.frobenius.transpose().inverse()?;
        let flag = match &self.flag_basis {
            Some(f) => Some(f.transpose().inverse()?.mul(&reversal(f))?),
            None => None,
        };
        Ok(PhiNablaModule { connection: g, frobenius: a, flag_basis: flag, ..self.clone() })
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let flag = match (&self.flag_basis, &other.flag_basis) {
            (Some(f1), Some(f2)) => Some(f1.direct_sum(f2)?),
            _ => None,
        };
        Ok(PhiNablaModule {
            ring: self.ring,
            connection: self.connection.direct_sum(&other.connection)?,
            frobenius: self.frobenius.direct_sum(&other.frobenius)?,
            frob: self.frob.clone(),
            flag_basis: flag,
            nonsingular: self.nonsingular && other.nonsingular,
        })
    }

    /// Extend scalars from `S_K` to the bounded Robba ring. The result is
    /// non-singular by construction.
    pub fn base_change(&self) -> Result<Self> {
        if self.ring != BaseRing::SK {
            return Err(Error::RingMismatch("base change starts from a module over S_K".into()));
        }
        self.validate().into_result()?;
        let mut out = self.clone();
        out.ring = BaseRing::EDagger;
        out.connection = self.connection.retag(RingTag::Laurent)?;
        out.frobenius = self.frobenius.retag(RingTag::Laurent)?;
        out.flag_basis = match &self.flag_basis {
            Some(f) => Some(f.retag(RingTag::Laurent)?),
            None => None,
        };
        out.nonsingular = true;
        Ok(out)
    }

    /// `nabla^log = t nabla`.
    pub fn to_log(&self) -> Result<LogPhiNablaModule> {
        if self.ring != BaseRing::SK {
            return Err(Error::RingMismatch("log structure needs a module over S_K".into()));
        }
        self.validate().into_result()?;
        Ok(LogPhiNablaModule {
            connection: self.connection.shift(1)?,
            frobenius: self.frobenius.clone(),
            frob: self.frob.clone(),
            flag_basis: self.flag_basis.clone(),
        })
    }
}

/// Anti-diagonal permutation with the same shape and windows as `m`.
fn reversal(m: &SeriesMatrix) -> SeriesMatrix {
    let n = m.rows();
    let j = QMatrix::from_fn(n, n, |a, b| if a + b == n - 1 { q(1) } else { q(0) });
    SeriesMatrix::constant(m.p(), m.ring(), &j, m.max_hi() - m.min_lo().min(0) + 1)
}

/// Connection matrix in the flag basis.
fn flag_connection(g: &SeriesMatrix, flag: &SeriesMatrix, log: bool) -> Result<SeriesMatrix> {
    let finv = flag.inverse()?;
    let d = if log { flag.log_derive() } else { flag.derive() };
    finv.mul(g)?.mul(flag)?.add(&finv.mul(&d)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogPhiNablaModule {
    connection: SeriesMatrix,
    frobenius: SeriesMatrix,
    frob: FrobeniusLift,
    flag_basis: Option<SeriesMatrix>,
}

impl LogPhiNablaModule {
    pub fn new(connection: SeriesMatrix, frobenius: SeriesMatrix, frob: FrobeniusLift) -> Result<Self> {
        let rank = connection.rows();
        check_square("G_log", &connection, rank)?;
        check_square("A", &frobenius, rank)?;
        for p in [connection.p(), frobenius.p()] {
            if p != frob.p() {
                return Err(Error::PrimeMismatch(frob.p(), p));
            }
        }
        Ok(LogPhiNablaModule {
            connection: connection.retag(RingTag::Plus)?,
            frobenius: frobenius.retag(RingTag::Plus)?,
            frob,
            flag_basis: None,
        })
    }

    pub fn with_flag_basis(mut self, flag: SeriesMatrix) -> Result<Self> {
        check_square("flag basis", &flag, self.rank())?;
        self.flag_basis = Some(flag.retag(RingTag::Plus)?);
        Ok(self)
    }

    pub fn rank(&self) -> usize {
        self.connection.rows()
    }

    pub fn p(&self) -> u32 {
        self.frob.p()
    }

    pub fn connection(&self) -> &SeriesMatrix {
        &self.connection
    }

    pub fn frobenius_matrix(&self) -> &SeriesMatrix {
        &self.frobenius
    }

    pub fn frob(&self) -> &FrobeniusLift {
        &self.frob
    }

    pub fn flag_basis(&self) -> Option<&SeriesMatrix> {
        self.flag_basis.as_ref()
    }

    /// `(delta_t(A) + G_log A, lambda A sigma(G_log))`.
    pub fn horizontality_sides(&self) -> Result<(SeriesMatrix, SeriesMatrix)> {
        let a = &self.frobenius;
        let lhs = a.log_derive().add(&self.connection.mul(a)?)?;
        let sg = self.connection.frobenius(&self.frob)?;
        let rhs = a.mul(&sg)?.scale_series(&self.frob.log_factor())?;
        Ok((lhs, rhs))
    }

    /// Constant term of `G_log`, with precisions.
    pub fn residue_matrix(&self) -> SeriesMatrix {
        self.connection.truncate(0)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        match self.frobenius.inverse() {
            Ok(_) => report.pass("frobenius_invertible", None),
            Err(e) => report.fail("frobenius_invertible", e.to_string(), None),
        }
        match self.horizontality_sides() {
            Ok((lhs, rhs)) => {
                let (outcome, window) = compare(&lhs, &rhs);
                report.record("log_horizontality", outcome, window);
            }
            Err(e) => report.fail("log_horizontality", e.to_string(), None),
        }
        let n = self.residue_matrix();
        let a0 = self.frobenius.truncate(0);
        let nilpotent = (0..self.rank()).try_fold(n.identity_like(self.rank()).truncate(0), |acc, _| acc.mul(&n));
        match nilpotent {
            Ok(power) => match power.first_nonzero() {
                None => report.pass("residue_nilpotent", None),
                Some(loc) => report.fail("residue_nilpotent", "N^rank is nonzero".into(), Some(loc.to_string())),
            },
            Err(e) => report.fail("residue_nilpotent", e.to_string(), None),
        }
        let qs = PAdicScalar::from_int(self.p(), self.frob.q() as i64);
        let relation = n.mul(&a0).and_then(|na| Ok((na, a0.mul(&n)?.map(|s| s.scale(&qs)))));
        match relation {
            Ok((lhs, rhs)) => report.record("residue_relation", Ok(lhs.first_mismatch(&rhs)), Some((0, 0))),
            Err(e) => report.fail("residue_relation", e.to_string(), None),
        }
        if let Some(flag) = &self.flag_basis {
            let outcome = flag_connection(&self.connection, flag, true).map(|g| strictly_upper_failure(&g));
            report.record("unipotent_flag", outcome, None);
        }
        report
    }

    /// `nabla = t^-1 nabla^log`, defined when the residue vanishes.
    pub fn from_log(&self) -> Result<PhiNablaModule> {
        let residue = self.residue_matrix();
        if !residue.is_zero_within_precision() {
            return Err(Error::NonSingularityViolation { residue: residue.constant_term().expect("window contains t^0") });
        }
        Ok(PhiNablaModule {
            ring: BaseRing::SK,
            connection: self.connection.shift(-1)?,
            frobenius: self.frobenius.clone(),
            frob: self.frob.clone(),
            flag_basis: self.flag_basis.clone(),
            nonsingular: false,
        })
    }
}

fn coeff_matrix(m: &SeriesMatrix, k: i64) -> Option<QMatrix> {
    let mut vals = Vec::with_capacity(m.rows() * m.cols());
    for s in m.entries() {
        vals.push(s.coeff(k)?.value().clone());
    }
    Some(QMatrix::from_fn(m.rows(), m.cols(), |i, j| vals[i * m.cols() + j].clone()))
}

fn coeff_scalar(s: &TruncatedSeries, k: i64) -> Option<Q> {
    s.coeff(k).map(|c| c.value().clone())
}

fn require_exact(name: &str, m: &SeriesMatrix) -> Result<()> {
    if !m.min_precision().is_exact() {
        return Err(Error::InvalidInput(format!("{name} must have exact coefficients")));
    }
    Ok(())
}

fn assemble(p: u32, coeffs: &[QMatrix]) -> SeriesMatrix {
    let r = coeffs[0].rows();
    let hi = coeffs.len() as i64 - 1;
    SeriesMatrix::from_fn(r, r, |i, j| {
        let vals = coeffs.iter().map(|c| PAdicScalar::exact(p, c[(i, j)].clone())).collect();
        TruncatedSeries::new(p, RingTag::Plus, 0, hi, vals).expect("window matches length")
    })
    .expect("nonempty")
}

/// Solve `A' + G A = sigma'(t) A sigma(G)` for `A` over `S_K`, given `A(0)`.
///
/// `sigma'(t)` vanishes to order `q - 1 >= 1`, so the coefficient of `t^n`
/// determines `A_{n+1}` from lower terms. Needs `G` and `u` known up to
/// `t^(window - 1)`.
pub fn solve_frobenius(g: &SeriesMatrix, a0: &QMatrix, frob: &FrobeniusLift, window: i64) -> Result<SeriesMatrix> {
    require_exact("G", g)?;
    let r = g.rows();
    check_square("G", g, r)?;
    if a0.rows() != r || a0.inverse().is_none() {
        return Err(Error::NotAUnit("A(0) must be an invertible matrix of the module's rank".into()));
    }
    let g = g.retag(RingTag::Plus)?;
    let sg = g.frobenius(frob)?;
    let ds = frob.sigma_t_derivative();
    let need = window - 1;
    if g.min_hi() < need || sg.min_hi() < need || ds.hi() < need {
        return Err(Error::TruncationInsufficient(format!("solving to t^{window} needs G, sigma(G), u known to t^{need}")));
    }
    let gk: Vec<QMatrix> = (0..=need.max(0)).map(|k| coeff_matrix(&g, k).unwrap()).collect();
    let sgk: Vec<QMatrix> = (0..=need.max(0)).map(|k| coeff_matrix(&sg, k).unwrap()).collect();
    let dk: Vec<Q> = (0..=need.max(0)).map(|k| coeff_scalar(&ds, k).unwrap()).collect();
    let mut a: Vec<QMatrix> = vec![a0.clone()];
    for n in 0..window as usize {
        // [sigma' A sigma(G)]_n - [G A]_n
        let mut rhs = QMatrix::zeros(r, r);
        for (x, d) in dk.iter().enumerate().take(n + 1) {
            if d == &q(0) {
                continue;
            }
            for (b, ab) in a.iter().enumerate().take(n - x + 1) {
                rhs = rhs.add(&ab.mul(&sgk[n - x - b]).scale(d));
            }
        }
        for k in 0..=n {
            rhs = rhs.sub(&gk[k].mul(&a[n - k]));
        }
        a.push(rhs.scale(&Q::new(1.into(), ((n + 1) as i64).into())));
    }
    Ok(assemble(frob.p(), &a))
}

/// Solve `delta_t(A) + G A = lambda A sigma(G)` for `A` over `S_K`, given
/// `A(0)` with `N A(0) = q A(0) N` where `N = G(0)`.
///
/// At order `n >= 1` the unknown `A_n` enters through
/// `X -> n X + N X - q X N`, which is invertible since `N` is nilpotent.
pub fn solve_log_frobenius(g: &SeriesMatrix, a0: &QMatrix, frob: &FrobeniusLift, window: i64) -> Result<SeriesMatrix> {
    require_exact("G_log", g)?;
    let r = g.rows();
    check_square("G_log", g, r)?;
    if a0.rows() != r || a0.inverse().is_none() {
        return Err(Error::NotAUnit("A(0) must be an invertible matrix of the module's rank".into()));
    }
    let g = g.retag(RingTag::Plus)?;
    let sg = g.frobenius(frob)?;
    let lam = frob.log_factor();
    if g.min_hi() < window || sg.min_hi() < window || lam.hi() < window {
        return Err(Error::TruncationInsufficient(format!("solving to t^{window} needs G, sigma(G), u known to t^{window}")));
    }
    let gk: Vec<QMatrix> = (0..=window).map(|k| coeff_matrix(&g, k).unwrap()).collect();
    let sgk: Vec<QMatrix> = (0..=window).map(|k| coeff_matrix(&sg, k).unwrap()).collect();
    let lk: Vec<Q> = (0..=window).map(|k| coeff_scalar(&lam, k).unwrap()).collect();
    let n0 = &gk[0];
    let qq = q(frob.q() as i64);
    if n0.mul(a0) != a0.mul(n0).scale(&qq) {
        return Err(Error::InvalidInput("A(0) does not satisfy N A(0) = q A(0) N".into()));
    }
    let mut a: Vec<QMatrix> = vec![a0.clone()];
    for n in 1..=window as usize {
        let mut rhs = QMatrix::zeros(r, r);
        for (x, l) in lk.iter().enumerate().take(n + 1) {
            if l == &q(0) {
                continue;
            }
            for b in 0..=(n - x) {
                if b == n {
                    continue;
                }
                rhs = rhs.add(&a[b].mul(&sgk[n - x - b]).scale(l));
            }
        }
        for k in 1..=n {
            rhs = rhs.sub(&gk[k].mul(&a[n - k]));
        }
        // vec(X) -> vec(n X + N X - q X N), row-major.
        let op = QMatrix::from_fn(r * r, r * r, |row, col| {
            let mut e = QMatrix::zeros(r, r);
            e[(col / r, col % r)] = q(1);
            let img = e.scale(&q(n as i64)).add(&n0.mul(&e)).sub(&e.mul(n0).scale(&qq));
            img[(row / r, row % r)].clone()
        });
        let rhs_vec: Vec<Q> = rhs.to_rows().into_iter().flatten().collect();
        let x = op.solve(&rhs_vec).expect("operator is invertible for nilpotent N");
        a.push(QMatrix::from_fn(r, r, |i, j| x[i * r + j].clone()));
    }
    Ok(assemble(frob.p(), &a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frob(p: u32, window: i64) -> FrobeniusLift {
        FrobeniusLift::standard(p, p as u64, window).unwrap()
    }

    fn constant(p: u32, rows: &[&[i64]], hi: i64) -> SeriesMatrix {
        SeriesMatrix::constant(p, RingTag::Plus, &QMatrix::from_i64(rows), hi)
    }

    #[test]
    fn trivial_module_validates() {
        let m = PhiNablaModule::trivial(&frob(3, 20), BaseRing::SK, 1, 10);
        let report = m.validate();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn tate_twist_validates() {
        let f = frob(5, 20);
        let g = SeriesMatrix::zero(5, RingTag::Plus, 1, 1, 0, 10);
        let a = constant(5, &[&[5]], 10);
        let m = PhiNablaModule::new(BaseRing::SK, g, a, f).unwrap();
        assert!(m.validate().passed());
    }

    #[test]
    fn wrong_frobenius_fails_horizontality() {
        let f = frob(3, 20);
        let g = constant(3, &[&[1]], 10);
        let a = constant(3, &[&[1]], 10);
        let m = PhiNablaModule::new(BaseRing::SK, g, a, f).unwrap();
        let report = m.validate();
        assert!(!report.check("horizontality").unwrap().passed);
        assert!(report.check("frobenius_invertible").unwrap().passed);
    }

    #[test]
    fn solved_frobenius_is_horizontal() {
        let f = FrobeniusLift::new(3, TruncatedSeries::from_ints(3, RingTag::Plus, 0, &[1, 3], 16).unwrap()).unwrap();
        let g = SeriesMatrix::from_rows(vec![
            vec![
                TruncatedSeries::from_ints(3, RingTag::Plus, 0, &[1, 2], 12).unwrap(),
                TruncatedSeries::from_ints(3, RingTag::Plus, 0, &[0, 0, 1], 12).unwrap(),
            ],
            vec![
                TruncatedSeries::from_ints(3, RingTag::Plus, 0, &[], 12).unwrap(),
                TruncatedSeries::from_ints(3, RingTag::Plus, 0, &[-1], 12).unwrap(),
            ],
        ])
        .unwrap();
        let a = solve_frobenius(&g, &QMatrix::from_i64(&[&[1, 1], &[0, 2]]), &f, 10).unwrap();
        let m = PhiNablaModule::new(BaseRing::SK, g, a, f).unwrap();
        let report = m.validate();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn unipotent_log_module_validates() {
        let f = frob(3, 20);
        let g = constant(3, &[&[0, 1], &[0, 0]], 12);
        let a0 = QMatrix::from_i64(&[&[1, 0], &[0, 3]]);
        let a = solve_log_frobenius(&g, &a0, &f, 10).unwrap();
        let l = LogPhiNablaModule::new(g, a, f).unwrap().with_flag_basis(SeriesMatrix::identity(3, RingTag::Plus, 2, 12)).unwrap();
        let report = l.validate();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn non_nilpotent_residue_is_rejected() {
        let f = frob(3, 20);
        let g = constant(3, &[&[1]], 10);
        let a = constant(3, &[&[1]], 10);
        let l = LogPhiNablaModule::new(g, a, f).unwrap();
        let report = l.validate();
        assert!(!report.check("residue_nilpotent").unwrap().passed);
        assert!(!report.check("residue_relation").unwrap().passed);
    }

    #[test]
    fn gauge_by_diag_one_t() {
        let f = frob(3, 30);
        let m = PhiNablaModule::trivial(&f, BaseRing::EDagger, 2, 10);
        let p = SeriesMatrix::from_rows(vec![
            vec![TruncatedSeries::from_ints(3, RingTag::Laurent, 0, &[1], 10).unwrap(), TruncatedSeries::zero(3, RingTag::Laurent, 0, 10)],
            vec![
                TruncatedSeries::zero(3, RingTag::Laurent, 0, 10),
                TruncatedSeries::from_ints(3, RingTag::Laurent, 0, &[0, 1], 10).unwrap(),
            ],
        ])
        .unwrap();
        let m2 = m.gauge_transform(&p).unwrap();
        // G' = P^-1 P' = diag(0, t^-1)
        let g = m2.connection();
        assert!(g.get(0, 0).is_zero_within_precision());
        assert_eq!(g.get(1, 1).valuation(), Some(-1));
        assert_eq!(g.get(1, 1).coeff(-1).unwrap(), PAdicScalar::one(3));
        assert_eq!(g.get(1, 1).terms().map(|(e, _)| e).collect::<Vec<_>>(), vec![-1]);
        assert!(m2.validate().passed(), "{:?}", m2.validate());
        let back = m2.gauge_transform(&p.inverse().unwrap()).unwrap();
        assert!(back.connection().eq_within_precision(m.connection()));
        assert!(back.frobenius_matrix().eq_within_precision(m.frobenius_matrix()));
    }

    #[test]
    fn non_unit_gauge_over_sk_is_rejected() {
        let f = frob(3, 30);
        let m = PhiNablaModule::trivial(&f, BaseRing::SK, 1, 10);
        let p = SeriesMatrix::from_rows(vec![vec![TruncatedSeries::from_ints(3, RingTag::Plus, 0, &[0, 1], 10).unwrap()]]).unwrap();
        assert!(matches!(m.gauge_transform(&p), Err(Error::NotAUnit(_))));
    }

    #[test]
    fn log_round_trip_and_residue_error() {
        let f = frob(3, 20);
        let m = PhiNablaModule::trivial(&f, BaseRing::SK, 2, 10);
        let l = m.to_log().unwrap();
        assert!(l.connection().is_zero_within_precision());
        assert_eq!(l.from_log().unwrap(), m);

        let g = constant(3, &[&[0, 1], &[0, 0]], 12);
        let a = solve_log_frobenius(&g, &QMatrix::from_i64(&[&[1, 0], &[0, 3]]), &f, 10).unwrap();
        let l = LogPhiNablaModule::new(g, a, f.clone()).unwrap();
        match l.from_log() {
            Err(Error::NonSingularityViolation { residue }) => {
                assert_eq!(residue, QMatrix::from_i64(&[&[0, 1], &[0, 0]]))
            }
            other => panic!("expected violation, got {other:?}"),
        }

        // G_log = t B gives back G = B
        let b = QMatrix::from_i64(&[&[2, -1], &[0, 4]]);
        let g = SeriesMatrix::constant(3, RingTag::Plus, &b, 10).shift(1).unwrap();
        let l = LogPhiNablaModule::new(g, SeriesMatrix::identity(3, RingTag::Plus, 2, 10), f).unwrap();
        let m = l.from_log().unwrap();
        assert_eq!(m.connection().constant_term().unwrap(), b);
    }

    #[test]
    fn base_change_marks_nonsingular() {
        let f = frob(2, 20);
        let m = PhiNablaModule::trivial(&f, BaseRing::SK, 1, 8);
        let e = m.base_change().unwrap();
        assert!(e.is_marked_nonsingular());
        assert_eq!(e.ring(), BaseRing::EDagger);
        assert_eq!(e.connection().get(0, 0).ring(), RingTag::Laurent);
        assert!(e.base_change().is_err());
    }
}
