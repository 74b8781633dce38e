//! The absolute Frobenius complex
//!
//! ```text
//! C_M:  M --d0--> M (+) M --d1--> M
//!       d0(m)    = (nabla m, (phi - 1) m)
//!       d1(x, y) = (1 - phi~) x + nabla y,      phi~ = sigma'(t) phi
//! ```
//!
//! and its cohomology. `d1 o d0 = nabla phi - phi~ nabla`, which vanishes
//! exactly when `phi` is horizontal.
//!
//! Two regimes are offered. On finite-dimensional data (a de Rham `H^0` and
//! `H^1` with their Frobenius matrices) the groups are
//!
//! ```text
//! H^0_F = H^0^{phi=1},   0 -> H^0_{phi=1} -> H^1_F -> H^1^{phi=1} -> 0,   H^2_F = H^1_{phi=1}
//! ```
//!
//! and are computed exactly. On a module over a series ring the de Rham
//! groups are approximated by linear systems on a coefficient window; only
//! `H^0` can be certified, everything depending on `H^1` is reported as
//! window-limited.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::{Rational, SCHEMA_VERSION};
use crate::linalg::{q, QMatrix};
use crate::padic::{PAdicScalar, Precision, Q};
use crate::phinabla::PhiNablaModule;
use crate::series::{RingTag, TruncatedSeries};
use crate::smatrix::{Location, SeriesMatrix};

const PROBE_SPAN: i64 = 6;
const RANDOM_PROBES: usize = 2;
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Debug)]
pub struct CMComplex {
    module: PhiNablaModule,
}

impl CMComplex {
    /// Build the complex, checking `d1 o d0 = 0` on the probes
    /// `e_j t^k` (`k` in the lowest few exponents of the window) and a few
    /// seeded dense random vectors.
    pub fn build(m: &PhiNablaModule) -> Result<Self> {
        Self::build_seeded(m, DEFAULT_SEED)
    }

    /// [`build`](Self::build) with a chosen seed for the random probes.
    pub fn build_seeded(m: &PhiNablaModule, seed: u64) -> Result<Self> {
        m.validate().into_result()?;
        let c = CMComplex { module: m.clone() };
        for probe in c.probes(seed) {
            if let Some(loc) = c.composition_defect(&probe)? {
                return Err(Error::ComplexNotExact(format!("probe {} gives a nonzero coefficient at {loc}", describe(&probe))));
            }
        }
        Ok(c)
    }

    pub fn module(&self) -> &PhiNablaModule {
        &self.module
    }

    fn probe_window(&self) -> (i64, i64) {
        let g = self.module.connection();
        let a = self.module.frobenius_matrix();
        (g.min_lo().min(a.min_lo()).min(0), g.min_hi().min(a.min_hi()))
    }

    fn probes(&self, seed: u64) -> Vec<SeriesMatrix> {
        let p = self.module.p();
        let ring = self.module.ring().tag();
        let r = self.module.rank();
        let (lo, hi) = self.probe_window();
        let mut out = Vec::new();
        for k in lo..=(lo + PROBE_SPAN).min(hi) {
            for j in 0..r {
                out.push(
                    SeriesMatrix::from_fn(r, 1, |i, _| {
                        let c = if i == j { PAdicScalar::one(p) } else { PAdicScalar::zero(p) };
                        TruncatedSeries::monomial(p, ring, c, k, lo, hi).expect("k in window")
                    })
                    .expect("nonempty"),
                );
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..RANDOM_PROBES {
            out.push(
                SeriesMatrix::new(
                    r,
                    1,
                    (0..r)
                        .map(|_| {
                            let vals: Vec<i64> = (lo..=hi).map(|_| rng.random_range(-9..=9)).collect();
                            TruncatedSeries::from_ints(p, ring, lo, &vals, hi).expect("fits")
                        })
                        .collect(),
                )
                .expect("shape"),
            );
        }
        out
    }

    /// `nabla v = v' + G v` on a column.
    pub fn nabla(&self, v: &SeriesMatrix) -> Result<SeriesMatrix> {
        v.derive().add(&self.module.connection().mul(v)?)
    }

    /// `phi(v) = A sigma(v)`.
    pub fn phi(&self, v: &SeriesMatrix) -> Result<SeriesMatrix> {
        self.module.frobenius_matrix().mul(&v.frobenius(self.module.frob())?)
    }

    /// `phi~(v) = sigma'(t) A sigma(v)`.
    pub fn phi_tilde(&self, v: &SeriesMatrix) -> Result<SeriesMatrix> {
        self.phi(v)?.scale_series(&self.module.frob().sigma_t_derivative())
    }

    pub fn d0(&self, m: &SeriesMatrix) -> Result<(SeriesMatrix, SeriesMatrix)> {
        Ok((self.nabla(m)?, self.phi(m)?.sub(m)?))
    }

    pub fn d1(&self, x: &SeriesMatrix, y: &SeriesMatrix) -> Result<SeriesMatrix> {
        x.sub(&self.phi_tilde(x)?)?.add(&self.nabla(y)?)
    }

    /// First coefficient of `d1(d0(m))` that is not zero within precision.
    /// Fails if no coefficient of the composite is determined.
    pub fn composition_defect(&self, m: &SeriesMatrix) -> Result<Option<Location>> {
        let (x, y) = self.d0(m)?;
        let z = self.d1(&x, &y)?;
        if z.entries().iter().all(TruncatedSeries::is_empty_window) {
            return Err(Error::TruncationInsufficient("d1 o d0 has an empty window".into()));
        }
        Ok(z.first_nonzero())
    }
}

fn describe(v: &SeriesMatrix) -> String {
    let parts: Vec<String> = v.entries().iter().map(|s| s.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Build the complex of a validated module.
pub fn build_complex(m: &PhiNablaModule) -> Result<CMComplex> {
    CMComplex::build(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "SCREAMING-KEBAB-CASE")]
pub enum CohomologyDim {
    Exact {
        value: usize,
    },
    /// Classes detected inside the window; the true dimension may differ.
    WindowLimited {
        detected: usize,
    },
}

impl CohomologyDim {
    pub fn value(self) -> usize {
        match self {
            CohomologyDim::Exact { value } => value,
            CohomologyDim::WindowLimited { detected } => detected,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, CohomologyDim::Exact { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Regime {
    Series,
    Finite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Status {
    Pass,
    WindowLimited,
}

/// A cohomology class, given by coordinates in a de Rham space.
///
/// In the finite regime the coordinates are in the supplied basis. In the
/// series regime `H0_dR` vectors list the coefficients of `t^k e_j` for
/// `k` in the report window (exponent-major), and `H1_dR` vectors are in the
/// basis of detected classes named in `classes`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Representative {
    pub degree: usize,
    pub space: String,
    pub coords: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CohomologyReport {
    pub version: String,
    pub regime: Regime,
    #[serde(rename = "h0F")]
    pub h0: CohomologyDim,
    #[serde(rename = "h1F")]
    pub h1: CohomologyDim,
    #[serde(rename = "h2F")]
    pub h2: CohomologyDim,
    pub representatives: Vec<Representative>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub classes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(i64, i64)>,
    #[serde(rename = "precisionNote")]
    pub precision_note: String,
}

impl CohomologyReport {
    /// `H^i_F`; zero for every `i > 2`.
    pub fn dim(&self, i: usize) -> CohomologyDim {
        match i {
            0 => self.h0,
            1 => self.h1,
            2 => self.h2,
            _ => CohomologyDim::Exact { value: 0 },
        }
    }

    pub fn status(&self) -> Status {
        if [self.h0, self.h1, self.h2].iter().all(|d| d.is_exact()) {
            Status::Pass
        } else {
            Status::WindowLimited
        }
    }
}

fn wire(v: &[Q]) -> Vec<Rational> {
    v.iter().map(Rational::from).collect()
}

fn unit_vector(n: usize, i: usize) -> Vec<Q> {
    (0..n).map(|k| if k == i { q(1) } else { q(0) }).collect()
}

fn minus_identity(phi: &QMatrix) -> QMatrix {
    phi.sub(&QMatrix::identity(phi.rows()))
}

/// Kernel basis of `Phi - 1` and standard basis vectors spanning a
/// complement of its image (whose classes form a basis of the coinvariants).
pub fn phi_fixed_and_coinvariants(phi: &QMatrix) -> (Vec<Vec<Q>>, Vec<Vec<Q>>) {
    assert!(phi.is_square(), "Phi must be square");
    let m = minus_identity(phi);
    let coker = m.cokernel_indices().into_iter().map(|i| unit_vector(phi.rows(), i)).collect();
    (m.kernel(), coker)
}

/// Exact cohomology from the Frobenius matrices on `H^0_dR` and `H^1_dR`.
/// For `h2F` this uses `phi~` on `H^1_dR`, which is what `phi1` must be.
pub fn cohomology_finite(phi0: &QMatrix, phi1: &QMatrix) -> CohomologyReport {
    let (k0, c0) = phi_fixed_and_coinvariants(phi0);
    let (k1, c1) = phi_fixed_and_coinvariants(phi1);
    let mut reps = Vec::new();
    let rep = |degree, space: &str, v: &Vec<Q>| Representative { degree, space: space.into(), coords: wire(v) };
    reps.extend(k0.iter().map(|v| rep(0, "H0_dR", v)));
    reps.extend(c0.iter().map(|v| rep(1, "H0_dR", v)));
    reps.extend(k1.iter().map(|v| rep(1, "H1_dR", v)));
    reps.extend(c1.iter().map(|v| rep(2, "H1_dR", v)));
    CohomologyReport {
        version: SCHEMA_VERSION.into(),
        regime: Regime::Finite,
        h0: CohomologyDim::Exact { value: k0.len() },
        h1: CohomologyDim::Exact { value: c0.len() + k1.len() },
        h2: CohomologyDim::Exact { value: c1.len() },
        representatives: reps,
        classes: Vec::new(),
        window: None,
        precision_note: "exact rational linear algebra".into(),
    }
}

/// Coefficient budget for the series regime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeriesWindow {
    /// Lowest exponent allowed in horizontal sections.
    pub lo: i64,
    /// Highest exponent solved for.
    pub hi: i64,
    /// Extra exponents used to test stability.
    pub margin: i64,
}

impl SeriesWindow {
    /// Everything the module's matrices determine.
    pub fn for_module(m: &PhiNablaModule) -> Self {
        let g = m.connection();
        let lo = if m.ring().tag() == RingTag::Plus { 0 } else { g.min_lo().min(m.frobenius_matrix().min_lo()).min(0) };
        SeriesWindow { lo, hi: lo + g.min_hi() + (-g.min_support()).max(1), margin: 2 }
    }
}

/// `nabla` as a matrix from coefficient vectors on `[a, b]` to coefficients
/// on `[e_lo, e_hi]`, on exactly the rows not touched by unknown input terms.
struct NablaSystem {
    e_lo: i64,
    e_hi: i64,
    r: usize,
    matrix: QMatrix,
}

impl NablaSystem {
    fn row(&self, e: i64, i: usize) -> usize {
        (e - self.e_lo) as usize * self.r + i
    }
}

fn check_floor(name: &str, m: &SeriesMatrix, upto: i64, floor: Option<i64>) -> Result<()> {
    let Some(floor) = floor else { return Ok(()) };
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let s = m.get(i, j);
            for (k, c) in s.coeffs().iter().enumerate() {
                let e = s.lo() + k as i64;
                if e > upto {
                    break;
                }
                if c.precision() < Precision::Abs(floor) {
                    return Err(Error::PrecisionExhausted {
                        location: format!("{name}[{i}][{j}] at t^{e} is only known modulo p^{}", c.precision().to_code()),
                    });
                }
            }
        }
    }
    Ok(())
}

/// With `strict`, a window reaching past the known coefficients of `G` is an
/// error; otherwise the equations are cut short.
fn nabla_system(m: &PhiNablaModule, a: i64, b: i64, floor: Option<i64>, strict: bool) -> Result<NablaSystem> {
    let g = m.connection();
    let r = m.rank();
    let plus = m.ring().tag() == RingTag::Plus;
    let lo_g = g.min_support();
    let e_lo = if plus { 0 } else { (a - 1).min(a + lo_g) };
    let e_hi = (b - 1).min(b + lo_g).min(a + g.min_hi());
    if strict && (b - 1).min(b + lo_g) > a + g.min_hi() {
        let (i, j) = (0..r * r).map(|k| (k / r, k % r)).min_by_key(|&(i, j)| g.get(i, j).hi()).unwrap();
        return Err(Error::PrecisionExhausted {
            location: format!("G[{i}][{j}] at t^{} is needed for the window [{a}, {b}]", g.get(i, j).hi() + 1),
        });
    }
    if e_hi < e_lo {
        return Err(Error::TruncationInsufficient(format!("window [{a}, {b}] gives no equations")));
    }
    check_floor("G", g, e_hi - a, floor)?;
    let cols = (b - a + 1) as usize * r;
    let rows = (e_hi - e_lo + 1) as usize * r;
    let mut matrix = QMatrix::zeros(rows, cols);
    let sys = NablaSystem { e_lo, e_hi, r, matrix: QMatrix::zeros(0, 0) };
    for k in a..=b {
        for j in 0..r {
            let col = (k - a) as usize * r + j;
            if k != 0 && (e_lo..=e_hi).contains(&(k - 1)) {
                matrix[(sys.row(k - 1, j), col)] = q(k);
            }
            for i in 0..r {
                let s = g.get(i, j);
                for (off, c) in s.terms() {
                    let e = k + off;
                    if e < e_lo || e > e_hi {
                        continue;
                    }
                    let cell = &mut matrix[(sys.row(e, i), col)];
                    *cell = &*cell + c.value();
                }
            }
        }
    }
    Ok(NablaSystem { matrix, ..sys })
}

/// Row basis (as vectors) of the span of `vs`.
fn span_basis(vs: &[Vec<Q>], len: usize) -> Vec<Vec<Q>> {
    if vs.is_empty() {
        return Vec::new();
    }
    let m = QMatrix::from_rows(vs.iter().map(|v| v[..len].to_vec()).collect());
    let rref = m.rref();
    (0..rref.pivots.len()).map(|i| rref.matrix.row(i).to_vec()).collect()
}

fn column_from_coords(m: &PhiNablaModule, lo: i64, hi: i64, coords: &[Q]) -> SeriesMatrix {
    let r = m.rank();
    let p = m.p();
    SeriesMatrix::from_fn(r, 1, |j, _| {
        let vals = (lo..=hi).map(|k| PAdicScalar::exact(p, coords[(k - lo) as usize * r + j].clone())).collect();
        TruncatedSeries::new(p, m.ring().tag(), lo, hi, vals).expect("window matches")
    })
    .expect("nonempty")
}

fn coords_on(v: &SeriesMatrix, lo: i64, hi: i64) -> Vec<Q> {
    let mut out = Vec::with_capacity(((hi - lo + 1).max(0) as usize) * v.rows());
    for e in lo..=hi {
        for j in 0..v.rows() {
            out.push(v.get(j, 0).coeff(e).map(|c| c.value().clone()).unwrap_or_else(|| q(0)));
        }
    }
    out
}

/// Express `target` in the span of `basis` (all vectors of equal length).
fn coordinates_in(basis: &[Vec<Q>], target: &[Q]) -> Option<Vec<Q>> {
    if basis.is_empty() {
        return target.iter().all(|x| x == &q(0)).then(Vec::new);
    }
    let m = QMatrix::from_fn(target.len(), basis.len(), |i, j| basis[j][i].clone());
    let x = m.solve(target)?;
    // the solution must be unique for the coordinates to mean anything
    (m.rank() == basis.len()).then_some(x)
}

struct H0Data {
    stable: bool,
    basis: Vec<Vec<Q>>,
    phi: Option<QMatrix>,
    window: (i64, i64),
}

fn h0_data(m: &PhiNablaModule, w: SeriesWindow, floor: Option<i64>) -> Result<H0Data> {
    let r = m.rank();
    let (a, b) = (w.lo, w.hi);
    let b2 = b - w.margin.max(1);
    if b2 < a {
        return Err(Error::TruncationInsufficient(format!("window [{a}, {b}] is narrower than the margin")));
    }
    let big = nabla_system(m, a, b, floor, true)?;
    let small = nabla_system(m, a, b2, floor, true)?;
    let low = (b2 - a + 1) as usize * r;
    let basis = span_basis(&big.matrix.kernel(), low);
    let stable = basis.len() == small.matrix.kernel().len();

    // phi on the projected sections
    check_floor("A", m.frobenius_matrix(), b2, floor)?;
    let comp = CMComplex { module: m.clone() };
    let mut images = Vec::with_capacity(basis.len());
    let mut c = b2;
    for v in &basis {
        let img = comp.phi(&column_from_coords(m, a, b2, v))?;
        c = c.min(img.min_hi());
        images.push(img);
    }
    let phi = if c < a {
        None
    } else {
        let len = (c - a + 1) as usize * r;
        let short: Vec<Vec<Q>> = basis.iter().map(|v| v[..len].to_vec()).collect();
        let cols: Option<Vec<Vec<Q>>> = images.iter().map(|img| coordinates_in(&short, &coords_on(img, a, c))).collect();
        cols.map(|cols| QMatrix::from_fn(basis.len(), basis.len(), |i, j| cols[j][i].clone()))
    };
    Ok(H0Data { stable: stable && phi.is_some(), basis, phi, window: (a, b2) })
}

struct H1Data {
    classes: Vec<(i64, usize)>,
    phi_tilde: Option<QMatrix>,
}

fn h1_data(m: &PhiNablaModule, w: SeriesWindow, floor: Option<i64>) -> Result<H1Data> {
    let r = m.rank();
    let plus = m.ring().tag() == RingTag::Plus;
    let src_lo = if plus { 0 } else { w.lo - w.margin };
    let sys = nabla_system(m, src_lo, w.hi, floor, false)?;
    let t_lo = if plus { 0 } else { w.lo - 1 };
    let t_hi = sys.e_hi;
    if t_hi < t_lo {
        return Err(Error::TruncationInsufficient("no target coefficients for H^1".into()));
    }
    let rows: Vec<usize> = (t_lo..=t_hi).flat_map(|e| (0..r).map(move |i| (e, i))).map(|(e, i)| sys.row(e, i)).collect();
    let all_cols: Vec<usize> = (0..sys.matrix.cols()).collect();
    let target = sys.matrix.select(&rows, &all_cols);
    let coker = target.cokernel_indices();
    let classes: Vec<(i64, usize)> = coker.iter().map(|&k| (t_lo + (k / r) as i64, k % r)).collect();

    // phi~ on the classes, reduced modulo the image
    let comp = CMComplex { module: m.clone() };
    let p = m.p();
    let ring = m.ring().tag();
    let mut cols = Vec::with_capacity(classes.len());
    for &(e, i) in &classes {
        let x = SeriesMatrix::from_fn(r, 1, |j, _| {
            let c = if i == j { PAdicScalar::one(p) } else { PAdicScalar::zero(p) };
            TruncatedSeries::monomial(p, ring, c, e, e.min(0), w.hi.max(e)).expect("in window")
        })
        .expect("nonempty");
        let img = comp.phi_tilde(&x)?;
        let c = t_hi.min(img.min_hi());
        if c < t_lo {
            cols.push(None);
            continue;
        }
        let keep = (c - t_lo + 1) as usize * r;
        let sub_rows: Vec<usize> = (0..keep).collect();
        let img_part = target.select(&sub_rows, &all_cols);
        let class_part = QMatrix::from_fn(keep, classes.len(), |row, k| if coker[k] == row { q(1) } else { q(0) });
        let rhs = coords_on(&img, t_lo, c);
        let sol = img_part.hstack(&class_part).solve(&rhs);
        cols.push(sol.map(|s| s[target.cols()..].to_vec()));
    }
    let phi_tilde =
        cols.into_iter().collect::<Option<Vec<_>>>().map(|cols| QMatrix::from_fn(classes.len(), classes.len(), |i, j| cols[j][i].clone()));
    Ok(H1Data { classes, phi_tilde })
}

/// Cohomology of a module over a series ring on a coefficient window.
///
/// `h0F` is exact when the horizontal sections found on `[lo, hi]` and on
/// `[lo, hi - margin]` project onto the same space and `phi` acts on them;
/// `h1F` and `h2F` depend on `H^1_dR`, which can be infinite-dimensional
/// over these rings, and are always window-limited. `precision` is a floor:
/// any input coefficient used with less absolute precision is an error.
pub fn cohomology(m: &PhiNablaModule, window: SeriesWindow, precision: Option<i64>) -> Result<CohomologyReport> {
    m.validate().into_result()?;
    let h0 = h0_data(m, window, precision)?;
    let h1 = h1_data(m, window, precision)?;

    let mut reps = Vec::new();
    let (h0_fixed, h0_coinv) = match &h0.phi {
        Some(phi0) => phi_fixed_and_coinvariants(phi0),
        None => (Vec::new(), Vec::new()),
    };
    let combine = |coords: &Vec<Q>| -> Vec<Q> {
        let len = h0.basis.first().map_or(0, Vec::len);
        let mut out = vec![q(0); len];
        for (c, v) in coords.iter().zip(&h0.basis) {
            for (o, x) in out.iter_mut().zip(v) {
                *o += c * x;
            }
        }
        out
    };
    for v in &h0_fixed {
        reps.push(Representative { degree: 0, space: "H0_dR".into(), coords: wire(&combine(v)) });
    }
    let (h1_fixed, h1_coinv) = match &h1.phi_tilde {
        Some(phi1) => phi_fixed_and_coinvariants(phi1),
        None => (Vec::new(), Vec::new()),
    };
    for v in &h0_coinv {
        reps.push(Representative { degree: 1, space: "H0_dR".into(), coords: wire(&combine(v)) });
    }
    for v in &h1_fixed {
        reps.push(Representative { degree: 1, space: "H1_dR".into(), coords: wire(v) });
    }
    for v in &h1_coinv {
        reps.push(Representative { degree: 2, space: "H1_dR".into(), coords: wire(v) });
    }

    let h0_dim =
        if h0.stable { CohomologyDim::Exact { value: h0_fixed.len() } } else { CohomologyDim::WindowLimited { detected: h0_fixed.len() } };
    let note = match precision {
        Some(m) => format!("coefficients used are known modulo p^{m} or better; sections solved on [{}, {}]", window.lo, window.hi),
        None => format!("coefficients taken at their stored precision; sections solved on [{}, {}]", window.lo, window.hi),
    };
    Ok(CohomologyReport {
        version: SCHEMA_VERSION.into(),
        regime: Regime::Series,
        h0: h0_dim,
        h1: CohomologyDim::WindowLimited { detected: h0_coinv.len() + h1_fixed.len() },
        h2: CohomologyDim::WindowLimited { detected: h1_coinv.len() },
        representatives: reps,
        classes: h1.classes.iter().map(|(e, i)| format!("t^{e} e_{i}")).collect(),
        window: Some(h0.window),
        precision_note: note,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactnessReport {
    pub exact: bool,
    /// `f_{i+1} o f_i = 0` for the three consecutive pairs.
    #[serde(rename = "compositionZero")]
    pub composition_zero: [bool; 3],
    /// `dim(ker f_i + im f_{i-1}) - dim(ker f_i cap im f_{i-1})` at
    /// `V_1 .. V_4`, with `im f_0 = 0`.
    pub defects: [usize; 4],
}

/// Check exactness of `0 -> V1 -> V2 -> V3 -> V4 -> V5` at `V1 .. V4`.
/// `maps[i]` is the matrix of `V_{i+1} -> V_{i+2}` (rows = target dimension).
pub fn five_term_check(dims: [usize; 5], maps: &[QMatrix; 4]) -> Result<ExactnessReport> {
    for (i, f) in maps.iter().enumerate() {
        if f.rows() != dims[i + 1] || f.cols() != dims[i] {
            return Err(Error::DimensionMismatch(format!(
                "map {} is {}x{}, expected {}x{}",
                i + 1,
                f.rows(),
                f.cols(),
                dims[i + 1],
                dims[i]
            )));
        }
    }
    let mut composition_zero = [true; 3];
    for i in 0..3 {
        composition_zero[i] = maps[i + 1].mul(&maps[i]).is_zero();
    }
    let mut defects = [0; 4];
    for i in 0..4 {
        let ker = maps[i].kernel();
        let ker_m = QMatrix::from_fn(dims[i], ker.len(), |r, c| ker[c][r].clone());
        let im = if i == 0 { QMatrix::zeros(dims[0], 0) } else { maps[i - 1].clone() };
        let dk = ker.len();
        let di = im.rank();
        let sum = ker_m.hstack(&im).rank();
        // dim(ker cap im) = dk + di - sum
        defects[i] = 2 * sum - dk - di;
    }
    Ok(ExactnessReport { exact: composition_zero.iter().all(|&b| b) && defects.iter().all(|&d| d == 0), composition_zero, defects })
}
