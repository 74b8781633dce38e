//! Finite-level model of the unipotent fundamental group.
//!
//! The group is represented by its graded nilpotent Lie algebra: a basis
//! graded in degrees `1..=L`, bracket structure constants, and Frobenius and
//! monodromy operators `Phi`, `N` with `N Phi = q Phi N`. `Phi` is a Lie
//! automorphism and `N` a Lie derivation; both preserve the lower central
//! filtration (degree `i` goes to degrees `>= i`) but need not be graded.
//!
//! The lower central quotient `U / U[n]` corresponds to degrees `1..n-1`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::{matrix_from_wire, matrix_to_wire, Rational, SCHEMA_VERSION};
use crate::lie::{FreeLie, TensorPoly};
use crate::linalg::{q, QMatrix};
use crate::monodromy::PhiNModule;
use crate::padic::Q;
use crate::phinabla::ValidationReport;

/// Highest supported level.
pub const MAX_LEVEL: usize = 4;

type Sparse = Vec<(usize, Q)>;

#[derive(Clone, Debug, PartialEq)]
pub struct NilpotentLieData {
    q: u64,
    level: usize,
    degrees: Vec<usize>,
    labels: Vec<String>,
    brackets: BTreeMap<(usize, usize), Sparse>,
    phi: QMatrix,
    n: QMatrix,
}

fn sparse(v: &[Q]) -> Sparse {
    v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect()
}

fn check_level(level: usize) -> Result<()> {
    if !(1..=MAX_LEVEL).contains(&level) {
        return Err(Error::LevelOutOfRange(format!("level {level} is outside 1..={MAX_LEVEL}")));
    }
    Ok(())
}

impl NilpotentLieData {
    /// Assemble raw data. Only shapes are checked here; see
    /// [`validate`](Self::validate) for the algebraic invariants.
    pub fn new(
        q: u64,
        level: usize,
        degrees: Vec<usize>,
        labels: Vec<String>,
        brackets: BTreeMap<(usize, usize), Sparse>,
        phi: QMatrix,
        n: QMatrix,
    ) -> Result<Self> {
        check_level(level)?;
        let d = degrees.len();
        if degrees.windows(2).any(|w| w[0] > w[1]) || degrees.iter().any(|&k| k == 0 || k > level) {
            return Err(Error::InvalidInput("degrees must be nondecreasing and lie in 1..=level".into()));
        }
        if labels.len() != d {
            return Err(Error::DimensionMismatch(format!("{} labels for {d} basis elements", labels.len())));
        }
        for (name, m) in [("Phi", &phi), ("N", &n)] {
            if m.rows() != d || m.cols() != d {
                return Err(Error::DimensionMismatch(format!("{name} is {}x{}, expected {d}x{d}", m.rows(), m.cols())));
            }
        }
        for (&(i, j), v) in &brackets {
            if i >= d || j >= d || v.iter().any(|(k, _)| *k >= d) {
                return Err(Error::InvalidInput(format!("bracket ({i}, {j}) refers to a missing basis element")));
            }
        }
        if q < 2 {
            return Err(Error::InvalidInput(format!("q = {q} must be at least 2")));
        }
        Ok(NilpotentLieData { q, level, degrees, labels, brackets, phi, n })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    /// `(d_1, ..., d_L)`.
    pub fn dims(&self) -> Vec<usize> {
        (1..=self.level).map(|k| self.degrees.iter().filter(|&&d| d == k).count()).collect()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn phi(&self) -> &QMatrix {
        &self.phi
    }

    pub fn n(&self) -> &QMatrix {
        &self.n
    }

    pub fn brackets(&self) -> &BTreeMap<(usize, usize), Sparse> {
        &self.brackets
    }

    /// `[e_i, e_j]`, using the stored value for `(i, j)` or minus the one
    /// for `(j, i)`.
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim()];
        if let Some(v) = self.brackets.get(&(i, j)) {
            for (k, c) in v {
                out[*k] += c;
            }
        } else if let Some(v) = self.brackets.get(&(j, i)) {
            for (k, c) in v {
                out[*k] -= c;
            }
        }
        out
    }

    pub fn bracket(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim()];
        for (i, a) in x.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in y.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                if self.degrees[i] + self.degrees[j] > self.level {
                    continue;
                }
                let ab = a * b;
                for (k, c) in self.bracket_basis(i, j).iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += &ab * c;
                    }
                }
            }
        }
        out
    }

    fn unit(&self, i: usize) -> Vec<Q> {
        (0..self.dim()).map(|k| if k == i { q(1) } else { q(0) }).collect()
    }

    fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let d = self.dim();
        (0..d).flat_map(move |i| (i + 1..d).map(move |j| (i, j))).filter(|&(i, j)| self.degrees[i] + self.degrees[j] <= self.level)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let d = self.dim();

        let bad_grading = self.brackets.iter().find_map(|(&(i, j), v)| {
            let target = self.degrees[i] + self.degrees[j];
            v.iter().find(|(k, c)| !c.is_zero() && self.degrees[*k] != target).map(|(k, _)| format!("[{i},{j}] has a component on {k}"))
        });
        match bad_grading {
            None => report.pass("grading", None),
            Some(at) => report.fail("grading", "bracket leaves its degree".into(), Some(at)),
        }

        let bad_antisym = (0..d)
            .find(|&i| self.brackets.get(&(i, i)).is_some_and(|v| v.iter().any(|(_, c)| !c.is_zero())))
            .map(|i| format!("[{i},{i}]"))
            .or_else(|| {
                self.brackets.keys().find_map(|&(i, j)| {
                    let other = self.brackets.get(&(j, i))?;
                    let a = self.bracket_from(&self.brackets[&(i, j)]);
                    let b = self.bracket_from(other);
                    (a.iter().zip(&b).any(|(x, y)| x != &-y)).then(|| format!("[{i},{j}]"))
                })
            });
        match bad_antisym {
            None => report.pass("antisymmetry", None),
            Some(at) => report.fail("antisymmetry", "[x,y] != -[y,x]".into(), Some(at)),
        }

        let mut bad_jacobi = None;
        'outer: for i in 0..d {
            for j in i + 1..d {
                for k in j + 1..d {
                    if self.degrees[i] + self.degrees[j] + self.degrees[k] > self.level {
                        continue;
                    }
                    let (ei, ej, ek) = (self.unit(i), self.unit(j), self.unit(k));
                    let mut s = self.bracket(&self.bracket_basis(i, j), &ek);
                    for (x, y) in [(self.bracket_basis(j, k), &ei), (self.bracket_basis(k, i), &ej)] {
                        for (a, b) in s.iter_mut().zip(self.bracket(&x, y)) {
                            *a += b;
                        }
                    }
                    if s.iter().any(|c| !c.is_zero()) {
                        bad_jacobi = Some(format!("({i},{j},{k})"));
                        break 'outer;
                    }
                }
            }
        }
        match bad_jacobi {
            None => report.pass("jacobi", None),
            Some(at) => report.fail("jacobi", "Jacobi identity fails".into(), Some(at)),
        }

        let bad_filtration = [("Phi", &self.phi), ("N", &self.n)].into_iter().find_map(|(name, m)| {
            (0..d).find_map(|j| {
                (0..d).find(|&i| self.degrees[i] < self.degrees[j] && !m[(i, j)].is_zero()).map(|i| format!("{name}[{i}][{j}]"))
            })
        });
        match bad_filtration {
            None => report.pass("filtration", None),
            Some(at) => report.fail("filtration", "operator lowers the degree".into(), Some(at)),
        }

        let col = |m: &QMatrix, i: usize| m.col(i);
        if self.phi.inverse().is_none() {
            report.fail("phi_automorphism", "Phi is singular".into(), None);
        } else {
            let bad = self.pairs().find(|&(i, j)| {
                let lhs = self.phi.mul_vec(&self.bracket_basis(i, j));
                let rhs = self.bracket(&col(&self.phi, i), &col(&self.phi, j));
                lhs != rhs
            });
            match bad {
                None => report.pass("phi_automorphism", None),
                Some((i, j)) => report.fail("phi_automorphism", "Phi[x,y] != [Phi x, Phi y]".into(), Some(format!("({i},{j})"))),
            }
        }

        let bad = self.pairs().find(|&(i, j)| {
            let lhs = self.n.mul_vec(&self.bracket_basis(i, j));
            let mut rhs = self.bracket(&col(&self.n, i), &self.unit(j));
            for (a, b) in rhs.iter_mut().zip(self.bracket(&self.unit(i), &col(&self.n, j))) {
                *a += b;
            }
            lhs != rhs
        });
        match bad {
            None => report.pass("n_derivation", None),
            Some((i, j)) => report.fail("n_derivation", "N[x,y] != [Nx,y] + [x,Ny]".into(), Some(format!("({i},{j})"))),
        }

        let v = PhiNModule::unchecked(self.q, self.phi.clone(), self.n.clone());
        match v {
            Ok(v) => {
                for c in v.validate().checks.into_iter().filter(|c| c.name != "phi_invertible") {
                    report.checks.push(c);
                }
            }
            Err(e) => report.fail("commutation", e.to_string(), None),
        }
        report
    }

    fn bracket_from(&self, v: &Sparse) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim()];
        for (k, c) in v {
            out[*k] += c;
        }
        out
    }

    /// Free Lie algebra on `images.len()` generators, with `Phi` and `N`
    /// extended from their values on the generators (given in coordinates of
    /// the Lyndon basis, possibly with components of higher degree).
    pub fn from_generator_images(q: u64, level: usize, names: &[String], phi_images: &[Vec<Q>], n_images: &[Vec<Q>]) -> Result<Self> {
        check_level(level)?;
        let g = names.len();
        let lie = FreeLie::new(g, level);
        if phi_images.len() != g || n_images.len() != g || phi_images.iter().chain(n_images).any(|v| v.len() != lie.dim()) {
            return Err(Error::DimensionMismatch(format!("need {g} images of length {}", lie.dim())));
        }
        let d = lie.dim();
        let mut brackets = BTreeMap::new();
        for i in 0..d {
            for j in i + 1..d {
                if lie.degree(i) + lie.degree(j) <= level {
                    let v = sparse(&lie.bracket(i, j));
                    if !v.is_empty() {
                        brackets.insert((i, j), v);
                    }
                }
            }
        }
        let phi_polys: Vec<TensorPoly> = phi_images.iter().map(|v| lie.to_poly(v)).collect();
        let n_polys: Vec<TensorPoly> = n_images.iter().map(|v| lie.to_poly(v)).collect();
        let identity = phi_polys.iter().enumerate().all(|(k, p)| p == &TensorPoly::word(vec![k as u8]));
        let phi = if identity {
            QMatrix::identity(d)
        } else {
            let cols = (0..d).map(|j| lie.decompose(&lie.apply_hom(&phi_polys, lie.poly(j)))).collect::<Result<Vec<_>>>()?;
            QMatrix::from_fn(d, d, |i, j| cols[j][i].clone())
        };
        let n = if n_polys.iter().all(TensorPoly::is_zero) {
            QMatrix::zeros(d, d)
        } else {
            let cols = (0..d).map(|j| lie.decompose(&lie.apply_derivation(&n_polys, lie.poly(j)))).collect::<Result<Vec<_>>>()?;
            QMatrix::from_fn(d, d, |i, j| cols[j][i].clone())
        };
        let labels = (0..d).map(|i| lie.label(i, names)).collect();
        let degrees = (0..d).map(|i| lie.degree(i)).collect();
        Self::new(q, level, degrees, labels, brackets, phi, n)
    }

    /// Free graded Lie algebra on `H1` truncated at `level`, with `Phi` and
    /// `N` extended as automorphism and derivation.
    pub fn free_nilpotent(h1: &PhiNModule, level: usize) -> Result<Self> {
        h1.validate().into_result()?;
        let g = h1.dim();
        let names: Vec<String> = (1..=g).map(|i| format!("x{i}")).collect();
        Self::free_nilpotent_named(h1, level, &names)
    }

    pub fn free_nilpotent_named(h1: &PhiNModule, level: usize, names: &[String]) -> Result<Self> {
        h1.validate().into_result()?;
        let g = h1.dim();
        if names.len() != g {
            return Err(Error::DimensionMismatch(format!("{} names for {g} generators", names.len())));
        }
        check_level(level)?;
        let d = FreeLie::new(g, level).dim();
        let image = |m: &QMatrix, i: usize| -> Vec<Q> { (0..d).map(|k| if k < g { m[(k, i)].clone() } else { q(0) }).collect() };
        let phi: Vec<Vec<Q>> = (0..g).map(|i| image(h1.phi(), i)).collect();
        let n: Vec<Vec<Q>> = (0..g).map(|i| image(h1.n(), i)).collect();
        Self::from_generator_images(h1.q(), level, names, &phi, &n)
    }

    /// Quotient by the ideal generated by `omega = sum [x_a, x_b]` over the
    /// given pairs of degree-one basis indices. `Phi` and `N` must preserve
    /// the ideal.
    pub fn impose_surface_relation(&self, pairs: &[(usize, usize)]) -> Result<Self> {
        let d = self.dim();
        let deg1 = self.degrees.iter().filter(|&&k| k == 1).count();
        if pairs.iter().any(|&(a, b)| a >= deg1 || b >= deg1 || a == b) {
            return Err(Error::InvalidInput("symplectic pairs must index distinct degree-one generators".into()));
        }
        let mut omega = vec![Q::zero(); d];
        for &(a, b) in pairs {
            for (o, x) in omega.iter_mut().zip(self.bracket_basis(a, b)) {
                *o += x;
            }
        }
        // ideal: close span{omega} under brackets with every basis element
        let mut ideal: Vec<Vec<Q>> = Vec::new();
        let mut queue = vec![omega.clone()];
        let mut rref_rows: Vec<Vec<Q>> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        while let Some(v) = queue.pop() {
            let r = reduce(&v, &rref_rows, &pivots);
            if r.iter().all(Zero::is_zero) {
                continue;
            }
            ideal.push(v.clone());
            let m = QMatrix::from_rows(ideal.clone());
            let rr = m.rref();
            rref_rows = (0..rr.pivots.len()).map(|i| rr.matrix.row(i).to_vec()).collect();
            pivots = rr.pivots;
            for k in 0..d {
                let w = self.bracket(&v, &self.unit(k));
                if w.iter().any(|c| !c.is_zero()) {
                    queue.push(w);
                }
            }
        }
        for (name, m) in [("Phi", &self.phi), ("N", &self.n)] {
            let img = m.mul_vec(&omega);
            let r = reduce(&img, &rref_rows, &pivots);
            if let Some(k) = r.iter().position(|c| !c.is_zero()) {
                return Err(Error::IdealNotStable {
                    generator: "omega".into(),
                    detail: format!("{name}(omega) has a component on {} outside the ideal", self.labels[k]),
                });
            }
        }
        let keep: Vec<usize> = (0..d).filter(|k| !pivots.contains(k)).collect();
        let project = |v: &[Q]| -> Vec<Q> {
            let r = reduce(v, &rref_rows, &pivots);
            keep.iter().map(|&k| r[k].clone()).collect()
        };
        let mut brackets = BTreeMap::new();
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate().skip(a + 1) {
                if self.degrees[i] + self.degrees[j] > self.level {
                    continue;
                }
                let v = sparse(&project(&self.bracket_basis(i, j)));
                if !v.is_empty() {
                    brackets.insert((a, b), v);
                }
            }
        }
        let descend = |m: &QMatrix| {
            let cols: Vec<Vec<Q>> = keep.iter().map(|&j| project(&m.col(j))).collect();
            QMatrix::from_fn(keep.len(), keep.len(), |i, j| cols[j][i].clone())
        };
        Self::new(
            self.q,
            self.level,
            keep.iter().map(|&k| self.degrees[k]).collect(),
            keep.iter().map(|&k| self.labels[k].clone()).collect(),
            brackets,
            descend(&self.phi),
            descend(&self.n),
        )
    }

    /// `U / U[n]`: keep degrees `< n`.
    pub fn lcs_quotient(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.level + 1 {
            return Err(Error::LevelOutOfRange(format!("quotient U/U[{n}] of a level-{} algebra", self.level)));
        }
        if n == 1 {
            return Err(Error::LevelOutOfRange("U/U[1] is trivial".into()));
        }
        let keep: Vec<usize> = (0..self.dim()).filter(|&k| self.degrees[k] < n).collect();
        let brackets =
            self.brackets.iter().filter(|(&(i, j), _)| self.degrees[i] + self.degrees[j] < n).map(|(&k, v)| (k, v.clone())).collect();
        let sub = |m: &QMatrix| m.select(&keep, &keep);
        Self::new(
            self.q,
            n - 1,
            keep.iter().map(|&k| self.degrees[k]).collect(),
            keep.iter().map(|&k| self.labels[k].clone()).collect(),
            brackets,
            sub(&self.phi),
            sub(&self.n),
        )
    }

    /// The degree-one part with the induced `(Phi, N)`.
    pub fn abelianization(&self) -> Result<PhiNModule> {
        let ab = self.lcs_quotient(2)?;
        PhiNModule::new(self.q, ab.phi, ab.n)
    }

    /// Good reduction holds exactly when `N` vanishes on `U / U[4]`, that is
    /// on degrees 1..3.
    pub fn good_reduction_verdict(&self) -> Result<ReductionVerdict> {
        if self.level < 3 {
            return Err(Error::LevelOutOfRange(format!("the verdict needs level >= 3, got {}", self.level)));
        }
        let quotient = self.lcs_quotient(4)?;
        let good = quotient.n.is_zero();
        let mut caveats = Vec::new();
        if self.level > 3 {
            caveats.push(format!("degrees 4..={} do not enter the criterion", self.level));
        }
        let on_h1 = self.lcs_quotient(2)?.n.is_zero();
        if !good && on_h1 {
            caveats.push("N vanishes on the abelianization; the obstruction sits in degree >= 2".into());
        }
        Ok(ReductionVerdict { good, level4_n: quotient.n, caveats })
    }

    /// Same algebra in the basis given by the columns of `p`, which must be
    /// block diagonal for the grading.
    pub fn change_basis(&self, p: &QMatrix) -> Result<Self> {
        let d = self.dim();
        if p.rows() != d || p.cols() != d {
            return Err(Error::DimensionMismatch(format!("basis change must be {d}x{d}")));
        }
        if (0..d).any(|i| (0..d).any(|j| self.degrees[i] != self.degrees[j] && !p[(i, j)].is_zero())) {
            return Err(Error::InvalidInput("basis change mixes degrees".into()));
        }
        let pinv = p.inverse().ok_or(Error::NotAUnit("basis change is singular".into()))?;
        let mut brackets = BTreeMap::new();
        for a in 0..d {
            for b in a + 1..d {
                if self.degrees[a] + self.degrees[b] > self.level {
                    continue;
                }
                let v = sparse(&pinv.mul_vec(&self.bracket(&p.col(a), &p.col(b))));
                if !v.is_empty() {
                    brackets.insert((a, b), v);
                }
            }
        }
        Self::new(
            self.q,
            self.level,
            self.degrees.clone(),
            self.labels.iter().map(|l| format!("{l}'")).collect(),
            brackets,
            pinv.mul(&self.phi).mul(p),
            pinv.mul(&self.n).mul(p),
        )
    }
}

/// Reduce `v` modulo the row space of an rref matrix.
fn reduce(v: &[Q], rows: &[Vec<Q>], pivots: &[usize]) -> Vec<Q> {
    let mut out = v.to_vec();
    for (row, &c) in rows.iter().zip(pivots) {
        if out[c].is_zero() {
            continue;
        }
        let f = out[c].clone();
        for (o, x) in out.iter_mut().zip(row) {
            if !x.is_zero() {
                *o -= &f * x;
            }
        }
    }
    out
}

/// Standard symplectic pairs `(a_i, b_i) = (i, g + i)`.
pub fn standard_pairs(g: usize) -> Vec<(usize, usize)> {
    (0..g).map(|i| (i, g + i)).collect()
}

/// Generator names `a1..ag, b1..bg`.
pub fn surface_names(g: usize) -> Vec<String> {
    (1..=g).map(|i| format!("a{i}")).chain((1..=g).map(|i| format!("b{i}"))).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct HallBasis {
    pub generators: usize,
    pub level: usize,
    pub labels: Vec<String>,
    pub degrees: Vec<usize>,
    pub dims: Vec<usize>,
}

/// Lyndon (Hall) basis of the free Lie algebra up to degree `level`.
pub fn hall_basis(g: usize, level: usize) -> Result<HallBasis> {
    check_level(level)?;
    if g == 0 {
        return Err(Error::InvalidInput("need at least one generator".into()));
    }
    let lie = FreeLie::new(g, level);
    let names: Vec<String> = (1..=g).map(|i| format!("x{i}")).collect();
    Ok(HallBasis {
        generators: g,
        level,
        labels: (0..lie.dim()).map(|i| lie.label(i, &names)).collect(),
        degrees: (0..lie.dim()).map(|i| lie.degree(i)).collect(),
        dims: lie.graded_dims(),
    })
}

/// Monodromy operators supported in a single degree `k >= 2`: derivations
/// `N` with `N(x_i)` in degree `k` satisfying `N Phi = q Phi N`, where `Phi`
/// is the graded automorphism induced by `phi1` on the generators.
///
/// Both sides of the relation are `Phi`-twisted derivations, so it suffices
/// to impose it on generators. Returns a basis of solutions, each given as
/// the list of generator images in Lyndon coordinates.
pub fn admissible_monodromy(phi1: &QMatrix, q: u64, level: usize, k: usize) -> Result<Vec<Vec<Vec<Q>>>> {
    check_level(level)?;
    if !(2..=level).contains(&k) {
        return Err(Error::LevelOutOfRange(format!("degree {k} outside 2..={level}")));
    }
    let g = phi1.rows();
    let names: Vec<String> = (1..=g).map(|i| format!("x{i}")).collect();
    let h1 = PhiNModule::new(q, phi1.clone(), QMatrix::zeros(g, g))?;
    let free = NilpotentLieData::free_nilpotent_named(&h1, level, &names)?;
    let idx: Vec<usize> = (0..free.dim()).filter(|&i| free.degrees[i] == k).collect();
    let dk = idx.len();
    let phik = free.phi.select(&idx, &idx);
    // unknowns: N(x_i) = sum_s c_{i,s} e_s, flattened as i * dk + s
    // equation for generator i: sum_j phi1[j][i] N(x_j) - q Phi_k N(x_i) = 0
    let qq = q_of(q);
    let m = QMatrix::from_fn(g * dk, g * dk, |row, col| {
        let (i, t) = (row / dk, row % dk);
        let (j, s) = (col / dk, col % dk);
        let mut v = if t == s { phi1[(j, i)].clone() } else { Q::zero() };
        if i == j {
            v -= &qq * &phik[(t, s)];
        }
        v
    });
    let d = free.dim();
    Ok(m.kernel()
        .into_iter()
        .map(|sol| {
            (0..g)
                .map(|i| {
                    let mut img = vec![Q::zero(); d];
                    for (s, &e) in idx.iter().enumerate() {
                        img[e] = sol[i * dk + s].clone();
                    }
                    img
                })
                .collect()
        })
        .collect())
}

fn q_of(q: u64) -> Q {
    Q::from_integer((q as i64).into())
}

/// Three generators with `Phi = diag(1, 1, q)` and the unique (up to scale)
/// admissible monodromy of degree two, `N x3 = [x1, x2]`. `N` is zero on the
/// abelianization but not on `U / U[4]`.
pub fn degree_two_monodromy_example(q: u64) -> Result<NilpotentLieData> {
    let phi1 = QMatrix::diagonal(&[Q::one(), Q::one(), q_of(q)]);
    let sols = admissible_monodromy(&phi1, q, 3, 2)?;
    if sols.len() != 1 {
        return Err(Error::ValidationFailed(format!("expected a one-dimensional solution space, got {}", sols.len())));
    }
    let names: Vec<String> = (1..=3).map(|i| format!("x{i}")).collect();
    let d = FreeLie::new(3, 3).dim();
    let phi: Vec<Vec<Q>> = (0..3).map(|i| (0..d).map(|k| if k < 3 { phi1[(k, i)].clone() } else { Q::zero() }).collect()).collect();
    NilpotentLieData::from_generator_images(q, 3, &names, &phi, &sols[0])
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionVerdict {
    pub good: bool,
    /// `N` on degrees 1..3.
    pub level4_n: QMatrix,
    pub caveats: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictWire {
    pub version: String,
    pub good: bool,
    #[serde(rename = "level4N")]
    pub level4_n: Vec<Vec<Rational>>,
    pub caveats: Vec<String>,
}

impl From<&ReductionVerdict> for VerdictWire {
    fn from(v: &ReductionVerdict) -> Self {
        VerdictWire { version: SCHEMA_VERSION.into(), good: v.good, level4_n: matrix_to_wire(&v.level4_n), caveats: v.caveats.clone() }
    }
}

/// `{level, dims, brackets: [[i, j, k, coeff]], Phi, N, q, labels?}`; the
/// basis is ordered by degree as given by `dims`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LieWire {
    pub level: usize,
    pub dims: Vec<usize>,
    pub brackets: Vec<(usize, usize, usize, Rational)>,
    #[serde(rename = "Phi")]
    pub phi: Vec<Vec<Rational>>,
    #[serde(rename = "N")]
    pub n: Vec<Vec<Rational>>,
    pub q: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl From<&NilpotentLieData> for LieWire {
    fn from(d: &NilpotentLieData) -> Self {
        let brackets = d.brackets.iter().flat_map(|(&(i, j), v)| v.iter().map(move |(k, c)| (i, j, *k, Rational::from(c)))).collect();
        LieWire {
            level: d.level,
            dims: d.dims(),
            brackets,
            phi: matrix_to_wire(&d.phi),
            n: matrix_to_wire(&d.n),
            q: d.q,
            labels: Some(d.labels.clone()),
        }
    }
}

impl TryFrom<&LieWire> for NilpotentLieData {
    type Error = Error;

    fn try_from(w: &LieWire) -> Result<Self> {
        check_level(w.level)?;
        if w.dims.len() != w.level {
            return Err(Error::DimensionMismatch(format!("{} graded dims for level {}", w.dims.len(), w.level)));
        }
        let degrees: Vec<usize> = w.dims.iter().enumerate().flat_map(|(k, &n)| std::iter::repeat_n(k + 1, n)).collect();
        let d = degrees.len();
        let labels = w.labels.clone().unwrap_or_else(|| (0..d).map(|i| format!("e{i}")).collect());
        let mut brackets: BTreeMap<(usize, usize), Sparse> = BTreeMap::new();
        for (i, j, k, c) in &w.brackets {
            let c = Q::try_from(c)?;
            let entry = brackets.entry((*i, *j)).or_default();
            match entry.iter_mut().find(|(kk, _)| kk == k) {
                Some((_, x)) => *x += c,
                None => entry.push((*k, c)),
            }
        }
        let phi = matrix_from_wire(&w.phi, d, "Phi")?;
        let n = matrix_from_wire(&w.n, d, "N")?;
        NilpotentLieData::new(w.q, w.level, degrees, labels, brackets, phi, n)
    }
}

/// Which first-cohomology dimensions drive the rank recursion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankOracle {
    /// `h1(U_n^dual) = 2 + rank(U_n) (2g - 2)`: constant Euler characteristic
    /// with `h0 = h2 = 1`.
    Euler,
    /// Graded pieces of the enveloping algebra of the surface Lie algebra,
    /// Hilbert series `1 / (1 - 2g t + t^2)`.
    Model,
}

pub fn euler_oracle(g: usize) -> impl Fn(usize, usize) -> usize {
    move |_, rank| (2 + rank as i64 * (2 * g as i64 - 2)).max(0) as usize
}

/// Coefficients of `1 / (1 - 2g t + t^2)` up to `t^len-1`.
pub fn surface_hilbert_series(g: usize, len: usize) -> Vec<usize> {
    let mut c: Vec<i64> = Vec::with_capacity(len);
    for k in 0..len {
        let v = match k {
            0 => 1,
            1 => 2 * g as i64,
            _ => 2 * g as i64 * c[k - 1] - c[k - 2],
        };
        c.push(v);
    }
    c.into_iter().map(|v| v as usize).collect()
}

pub fn model_oracle(g: usize) -> impl Fn(usize, usize) -> usize {
    move |n, _| surface_hilbert_series(g, n + 1)[n]
}

/// `rk U_1 = 1`, `rk U_{n+1} = rk U_n + h1(n, rk U_n)`.
pub fn universal_rank_recursion(level: usize, h1: impl Fn(usize, usize) -> usize) -> Result<Vec<usize>> {
    check_level(level)?;
    let mut ranks = vec![1];
    for n in 1..level {
        let r = ranks[n - 1];
        ranks.push(r + h1(n, r));
    }
    Ok(ranks)
}

/// Ranks of the enveloping algebra modulo degree `>= n`, `n = 1..=level`,
/// from graded Lie dimensions by Poincare-Birkhoff-Witt.
pub fn enveloping_ranks(lie_dims: &[usize], level: usize) -> Vec<usize> {
    let mut series = vec![0u128; level];
    series[0] = 1;
    for (j, &d) in lie_dims.iter().enumerate() {
        let j = j + 1;
        // multiply by (1 - t^j)^-d = sum_m C(d + m - 1, m) t^(j m)
        let mut next = vec![0u128; level];
        for (a, &s) in series.iter().enumerate() {
            if s == 0 {
                continue;
            }
            let mut m = 0;
            let mut binom: u128 = 1;
            while a + j * m < level {
                next[a + j * m] += s * binom;
                m += 1;
                binom = binom * (d as u128 + m as u128 - 1) / m as u128;
            }
        }
        series = next;
    }
    let mut acc = 0;
    series
        .into_iter()
        .map(|c| {
            acc += c as usize;
            acc
        })
        .collect()
}

/// Ranks from the surface-relation Hall model: graded dimensions of the
/// quotient of the free Lie algebra on `2g` generators by `omega`, fed
/// through PBW.
pub fn surface_model_ranks(g: usize, level: usize) -> Result<Vec<usize>> {
    check_level(level)?;
    if g == 0 {
        return Err(Error::InvalidInput("genus must be at least 1".into()));
    }
    if level == 1 {
        return Ok(vec![1]);
    }
    let lie_level = level - 1;
    let dims = if lie_level == 1 {
        vec![2 * g]
    } else {
        let h1 = PhiNModule::new(2, QMatrix::identity(2 * g), QMatrix::zeros(2 * g, 2 * g))?;
        let free = NilpotentLieData::free_nilpotent_named(&h1, lie_level, &surface_names(g))?;
        free.impose_surface_relation(&standard_pairs(g))?.dims()
    };
    Ok(enveloping_ranks(&dims, level))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub version: String,
    pub g: usize,
    pub level: usize,
    pub oracle: RankOracle,
    pub ranks: Vec<usize>,
    /// Ranks from the Hall model of the surface Lie algebra.
    pub model: Vec<usize>,
    pub agrees: bool,
    #[serde(rename = "firstDisagreement", skip_serializing_if = "Option::is_none")]
    pub first_disagreement: Option<usize>,
}

pub fn rank_report(g: usize, level: usize, oracle: RankOracle) -> Result<RankReport> {
    let ranks = match oracle {
        RankOracle::Euler => universal_rank_recursion(level, euler_oracle(g))?,
        RankOracle::Model => universal_rank_recursion(level, model_oracle(g))?,
    };
    let model = surface_model_ranks(g, level)?;
    let first = ranks.iter().zip(&model).position(|(a, b)| a != b).map(|i| i + 1);
    Ok(RankReport { version: SCHEMA_VERSION.into(), g, level, oracle, ranks, model, agrees: first.is_none(), first_disagreement: first })
}
