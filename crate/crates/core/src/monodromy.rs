//! (phi, N)-modules, residues of log modules, and the non-singularity test
//! `N = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{q, QMatrix};
use crate::phinabla::{LogPhiNablaModule, PhiNablaModule, ValidationReport};

/// Finite-dimensional space with invertible `Phi`, nilpotent `N` and
/// `N Phi = q Phi N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiNModule {
    q: u64,
    phi: QMatrix,
    n: QMatrix,
}

impl PhiNModule {
    /// Build and check all invariants.
    pub fn new(q: u64, phi: QMatrix, n: QMatrix) -> Result<Self> {
        let v = Self::unchecked(q, phi, n)?;
        v.validate().into_result()?;
        Ok(v)
    }

    /// Shape checks only; call [`validate`](Self::validate) before relying on
    /// the algebraic invariants.
    pub fn unchecked(q: u64, phi: QMatrix, n: QMatrix) -> Result<Self> {
        let d = phi.rows();
        if !phi.is_square() || n.rows() != d || n.cols() != d {
            return Err(Error::DimensionMismatch(format!("Phi is {}x{}, N is {}x{}", phi.rows(), phi.cols(), n.rows(), n.cols())));
        }
        if q < 2 {
            return Err(Error::InvalidInput(format!("q = {q} must be at least 2")));
        }
        Ok(PhiNModule { q, phi, n })
    }

    pub fn unit(q: u64) -> Self {
        PhiNModule { q, phi: QMatrix::identity(1), n: QMatrix::zeros(1, 1) }
    }

    pub fn dim(&self) -> usize {
        self.phi.rows()
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn phi(&self) -> &QMatrix {
        &self.phi
    }

    pub fn n(&self) -> &QMatrix {
        &self.n
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.phi.inverse().is_some() {
            report.pass("phi_invertible", None);
        } else {
            report.fail("phi_invertible", "Phi is singular".into(), None);
        }
        if self.n.is_nilpotent() {
            report.pass("n_nilpotent", None);
        } else {
            report.fail("n_nilpotent", "N^dim is nonzero".into(), None);
        }
        let lhs = self.n.mul(&self.phi);
        let rhs = self.phi.mul(&self.n).scale(&q(self.q as i64));
        if lhs == rhs {
            report.pass("commutation", None);
        } else {
            let diff = lhs.sub(&rhs);
            let at = (0..self.dim())
                .flat_map(|i| (0..self.dim()).map(move |j| (i, j)))
                .find(|&ij| diff[ij] != q(0))
                .map(|(i, j)| format!("entry ({i}, {j})"));
            report.fail("commutation", "N Phi != q Phi N".into(), at);
        }
        report
    }

    fn same_q(&self, other: &Self) -> Result<()> {
        if self.q != other.q {
            return Err(Error::InvalidInput(format!("q mismatch: {} vs {}", self.q, other.q)));
        }
        Ok(())
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.same_q(other)?;
        let i1 = QMatrix::identity(self.dim());
        let i2 = QMatrix::identity(other.dim());
        Ok(PhiNModule { q: self.q, phi: self.phi.kron(&other.phi), n: self.n.kron(&i2).add(&i1.kron(&other.n)) })
    }

    pub fn dual(&self) -> Result<Self> {
        let phi = self.phi.transpose().inverse().ok_or(Error::NotAUnit("Phi is singular".into()))?;
        Ok(PhiNModule { q: self.q, phi, n: self.n.transpose().neg() })
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        self.same_q(other)?;
        let d1 = self.dim();
        let d = d1 + other.dim();
        let block = |a: &QMatrix, b: &QMatrix| {
            QMatrix::from_fn(d, d, |i, j| match (i < d1, j < d1) {
                (true, true) => a[(i, j)].clone(),
                (false, false) => b[(i - d1, j - d1)].clone(),
                _ => q(0),
            })
        };
        Ok(PhiNModule { q: self.q, phi: block(&self.phi, &other.phi), n: block(&self.n, &other.n) })
    }

    /// Same object in the basis given by the columns of `c`.
    pub fn conjugate(&self, c: &QMatrix) -> Result<Self> {
        let cinv = c.inverse().ok_or(Error::NotAUnit("change of basis is singular".into()))?;
        if c.rows() != self.dim() {
            return Err(Error::DimensionMismatch(format!("basis change of size {} on dimension {}", c.rows(), self.dim())));
        }
        Ok(PhiNModule { q: self.q, phi: cinv.mul(&self.phi).mul(c), n: cinv.mul(&self.n).mul(c) })
    }
}

/// `(Phi, N) = (A(0), G_log(0))`.
pub fn residue(l: &LogPhiNablaModule) -> Result<PhiNModule> {
    l.validate().into_result()?;
    let n = l.residue_matrix().constant_term().expect("window contains t^0");
    let phi = l.frobenius_matrix().truncate(0).constant_term().expect("window contains t^0");
    let v = PhiNModule::unchecked(l.frob().q(), phi, n)?;
    let report = v.validate();
    assert!(report.passed(), "residue of a validated log module failed: {report:?}");
    Ok(v)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// The module over `S_K` with `nabla = t^-1 nabla^log`.
    Module(PhiNablaModule),
    /// The nonzero monodromy operator.
    Monodromy(QMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct NonsingularVerdict {
    pub nonsingular: bool,
    pub witness: Witness,
    pub caveats: Vec<String>,
}

/// A regular module is non-singular exactly when its monodromy vanishes; in
/// that case dividing the log connection by `t` exhibits it.
pub fn is_nonsingular(l: &LogPhiNablaModule) -> Result<NonsingularVerdict> {
    l.validate().into_result()?;
    let residue = l.residue_matrix();
    if residue.is_zero_within_precision() {
        let mut caveats = Vec::new();
        let inexact: Vec<_> = residue.entries().iter().filter_map(|s| s.coeff(0)).filter(|c| !c.is_exact_zero()).collect();
        if let Some(floor) = inexact.iter().map(|c| c.precision()).min() {
            caveats.push(format!("N vanishes only modulo {}", floor));
        }
        Ok(NonsingularVerdict { nonsingular: true, witness: Witness::Module(l.from_log()?), caveats })
    } else {
        let n = residue.constant_term().expect("window contains t^0");
        Ok(NonsingularVerdict { nonsingular: false, witness: Witness::Monodromy(n), caveats: Vec::new() })
    }
}

/// Wire form: `{dim, q, Phi, N}` with rational entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiNWire {
    pub dim: usize,
    pub q: u64,
    #[serde(rename = "Phi")]
    pub phi: Vec<Vec<crate::json::Rational>>,
    #[serde(rename = "N")]
    pub n: Vec<Vec<crate::json::Rational>>,
}

impl From<&PhiNModule> for PhiNWire {
    fn from(v: &PhiNModule) -> Self {
        PhiNWire { dim: v.dim(), q: v.q, phi: crate::json::matrix_to_wire(&v.phi), n: crate::json::matrix_to_wire(&v.n) }
    }
}

impl TryFrom<PhiNWire> for PhiNModule {
    type Error = Error;

    fn try_from(w: PhiNWire) -> Result<Self> {
        let phi = crate::json::matrix_from_wire(&w.phi, w.dim, "Phi")?;
        let n = crate::json::matrix_from_wire(&w.n, w.dim, "N")?;
        PhiNModule::unchecked(w.q, phi, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::FrobeniusLift;
    use crate::phinabla::{solve_log_frobenius, BaseRing};
    use crate::series::RingTag;
    use crate::smatrix::SeriesMatrix;

    fn tate(q: u64) -> PhiNModule {
        PhiNModule::new(q, QMatrix::diagonal(&[crate::linalg::q(1), crate::linalg::q(q as i64)]), QMatrix::from_i64(&[&[0, 1], &[0, 0]]))
            .unwrap()
    }

    #[test]
    fn invariants_are_checked() {
        assert!(PhiNModule::new(3, QMatrix::identity(2), QMatrix::from_i64(&[&[0, 1], &[0, 0]])).is_err());
        assert!(PhiNModule::new(3, QMatrix::identity(1), QMatrix::from_i64(&[&[1]])).is_err());
        let v = tate(3);
        // N Phi = [[0, q], [0, 0]] = q Phi N
        assert_eq!(v.n().mul(v.phi()), QMatrix::from_i64(&[&[0, 3], &[0, 0]]));
    }

    #[test]
    fn tensor_dual_and_unit() {
        let v = tate(5);
        assert_eq!(v.tensor(&PhiNModule::unit(5)).unwrap(), v);
        assert_eq!(v.dual().unwrap().dual().unwrap(), v);
        assert!(v.tensor(&v.dual().unwrap()).unwrap().validate().passed());
        assert!(v.tensor(&PhiNModule::unit(3)).is_err());
        assert!(v.direct_sum(&v).unwrap().validate().passed());
    }

    #[test]
    fn residue_and_verdict() {
        let f = FrobeniusLift::standard(3, 3, 20).unwrap();
        let g = SeriesMatrix::constant(3, RingTag::Plus, &QMatrix::from_i64(&[&[0, 1], &[0, 0]]), 12);
        let a = solve_log_frobenius(&g, &QMatrix::from_i64(&[&[1, 0], &[0, 3]]), &f, 10).unwrap();
        let l = LogPhiNablaModule::new(g, a, f.clone()).unwrap();
        let v = residue(&l).unwrap();
        assert_eq!(v.n(), &QMatrix::from_i64(&[&[0, 1], &[0, 0]]));
        let verdict = is_nonsingular(&l).unwrap();
        assert!(!verdict.nonsingular);
        assert_eq!(verdict.witness, Witness::Monodromy(v.n().clone()));

        let m = PhiNablaModule::trivial(&f, BaseRing::SK, 2, 10);
        let l = m.to_log().unwrap();
        let v = residue(&l).unwrap();
        assert!(v.n().is_zero());
        assert_eq!(v.phi(), &QMatrix::identity(2));
        let verdict = is_nonsingular(&l).unwrap();
        assert!(verdict.nonsingular);
        assert_eq!(verdict.witness, Witness::Module(m));
    }
}
