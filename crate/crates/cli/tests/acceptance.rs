//! Acceptance suite: ten criteria, each with its own time budget. Prints one
//! line per criterion and fails if any criterion fails or runs over budget.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use frobmod::frobcoh::{cohomology_finite, CMComplex, CohomologyDim};
use frobmod::gen::Gen;
use frobmod::json::{AnyModule, ModuleWire};
use frobmod::lie::witt_dimension;
use frobmod::linalg::{q, QMatrix};
use frobmod::monodromy::{is_nonsingular, residue, Witness};
use frobmod::padic::{Precision, Q};
use frobmod::phinabla::PhiNablaModule;
use frobmod::pi1::{degree_two_monodromy_example, hall_basis, LieWire, NilpotentLieData};
use frobmod::series::RingTag;
use frobmod::smatrix::SeriesMatrix;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// 1. `d/dt sigma(f) = sigma(t)' sigma(f')`, coefficientwise within precision.
fn commutation_law() -> Outcome {
    let mut g = Gen::new(1);
    let mut compared = 0usize;
    for case in 0..200 {
        let p = [2, 3, 5][case % 3];
        let sigma = g.any_frobenius(p, 40);
        let f = g.series_with(p, RingTag::Laurent, -6, 12, 0.6, Precision::Abs(12));
        let lhs = sigma.apply(&f).map_err(e2s)?.derive();
        let rhs = sigma.sigma_t_derivative().mul(&sigma.apply(&f.derive()).map_err(e2s)?).map_err(e2s)?;
        let (lo, hi) = lhs.common_window(&rhs);
        ensure(lo <= hi, || format!("case {case}: no common window"))?;
        compared += (hi - lo + 1) as usize;
        if let Some(e) = lhs.first_mismatch(&rhs) {
            return Err(format!("case {case} (p = {p}): mismatch at t^{e}"));
        }
    }
    Ok(format!("200 series, {compared} coefficients compared"))
}

fn random_vector(g: &mut Gen, m: &PhiNablaModule) -> SeriesMatrix {
    let c = m.connection();
    let (lo, hi) = (c.min_lo().min(0), c.min_hi());
    let ring = m.ring().tag();
    let entries = (0..m.rank()).map(|_| g.series(m.p(), ring, if ring == RingTag::Plus { 0 } else { lo }, hi, 0.7)).collect();
    SeriesMatrix::new(m.rank(), 1, entries).unwrap()
}

/// 2. `d1 o d0 = 0` on validated modules.
fn complex_property() -> Outcome {
    let mut g = Gen::new(2);
    for case in 0..100 {
        let p = [2, 3, 5][case % 3];
        let rank = 1 + case % 4;
        let m = if case % 2 == 0 { g.sk_module(p, rank, 10) } else { g.edagger_module(p, rank, 10) }.map_err(e2s)?;
        // build validates the module before probing
        let c = CMComplex::build_seeded(&m, case as u64).map_err(|e| format!("case {case}: {e}"))?;
        for _ in 0..2 {
            let v = random_vector(&mut g, &m);
            if let Some(loc) = c.composition_defect(&v).map_err(e2s)? {
                return Err(format!("case {case}: d1 d0 nonzero at {loc}"));
            }
        }
    }
    Ok("100 modules, ranks 1-4, S_K and E_dagger".into())
}

/// Rank by fraction-free (Bareiss) elimination over the integers; shares no
/// code with the library's rational row reduction.
fn bareiss_rank(m: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, piv);
        for r in rank + 1..rows {
            for k in c + 1..cols {
                let v = (&a[rank][c] * &a[r][k] - &a[r][c] * &a[rank][k]) / &prev;
                a[r][k] = v;
            }
            a[r][c] = BigInt::zero();
        }
        prev = a[rank][c].abs();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn int_phi(g: &mut Gen, n: usize) -> Vec<Vec<i64>> {
    // Phi = 1 + B C^T with a small inner dimension, so Phi - 1 has a kernel
    let k = g.rng_range(0, n);
    let b: Vec<Vec<i64>> = (0..n).map(|_| (0..k).map(|_| g.int(2)).collect()).collect();
    let c: Vec<Vec<i64>> = (0..n).map(|_| (0..k).map(|_| g.int(2)).collect()).collect();
    (0..n).map(|i| (0..n).map(|j| (i == j) as i64 + (0..k).map(|t| b[i][t] * c[j][t]).sum::<i64>()).collect()).collect()
}

/// 3. Finite-regime dimensions against an independent rank oracle.
fn finite_bullets() -> Outcome {
    let mut g = Gen::new(3);
    for case in 0..100 {
        let (n0, n1) = (g.rng_range(0, 8), g.rng_range(1, 8));
        let (a0, a1) = (int_phi(&mut g, n0), int_phi(&mut g, n1));
        let to_q = |m: &Vec<Vec<i64>>, n: usize| {
            if n == 0 {
                QMatrix::zeros(0, 0)
            } else {
                QMatrix::from_rows(m.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
            }
        };
        let minus_one = |m: &Vec<Vec<i64>>| -> Vec<Vec<i64>> {
            m.iter().enumerate().map(|(i, r)| r.iter().enumerate().map(|(j, &x)| x - (i == j) as i64).collect()).collect()
        };
        let (r0, r1) = (bareiss_rank(&minus_one(&a0)), bareiss_rank(&minus_one(&a1)));
        let report = cohomology_finite(&to_q(&a0, n0), &to_q(&a1, n1));
        let expect = [n0 - r0, (n0 - r0) + (n1 - r1), n1 - r1, 0, 0];
        for (i, want) in expect.iter().enumerate() {
            ensure(report.dim(i) == CohomologyDim::Exact { value: *want }, || {
                format!("case {case}: h{i}F = {:?}, oracle {want}", report.dim(i))
            })?;
        }
        // kernel representatives really are fixed
        for rep in report.representatives.iter().filter(|r| r.degree == 0) {
            let v: Vec<Q> = rep.coords.iter().map(|c| Q::try_from(c).unwrap()).collect();
            ensure(to_q(&a0, n0).mul_vec(&v) == v, || format!("case {case}: H0 representative is not fixed"))?;
        }
    }
    Ok("100 integer pairs up to dim 8 vs Bareiss ranks".into())
}

fn nilpotent(n: &QMatrix) -> bool {
    let mut p = n.clone();
    for _ in 1..n.rows().max(1) {
        p = p.mul(n);
    }
    p.is_zero()
}

/// 4. Residues of solved log modules are `(Phi, N)`-modules.
fn residue_relation() -> Outcome {
    let mut g = Gen::new(4);
    let mut nonzero = 0;
    for case in 0..100 {
        let p = [2, 3, 5][case % 3];
        let l = g.log_module(p, 1 + case % 4, 6, case % 2 == 0).map_err(e2s)?;
        let r = residue(&l).map_err(|e| format!("case {case}: {e}"))?;
        let qq = q(l.frob().q() as i64);
        ensure(nilpotent(r.n()), || format!("case {case}: N not nilpotent"))?;
        ensure(r.n().mul(r.phi()) == r.phi().mul(r.n()).scale(&qq), || format!("case {case}: N Phi != q Phi N"))?;
        nonzero += !r.n().is_zero() as usize;
    }
    Ok(format!("100 log modules, {nonzero} with N != 0"))
}

/// 5. `to_log` / `from_log` round trip and singular witnesses.
fn nonsingular_round_trip() -> Outcome {
    let mut g = Gen::new(5);
    for case in 0..50 {
        let m = g.sk_module([2, 3, 5][case % 3], 1 + case % 3, 8).map_err(e2s)?;
        let l = m.to_log().map_err(e2s)?;
        let v = is_nonsingular(&l).map_err(e2s)?;
        ensure(v.nonsingular, || format!("case {case}: to_log(M) judged singular"))?;
        ensure(l.from_log().map_err(e2s)? == m, || format!("case {case}: from_log(to_log(M)) != M"))?;
        ensure(v.witness == Witness::Module(m), || format!("case {case}: witness is not M"))?;
    }
    for case in 0..50 {
        let l = g.log_module([2, 3, 5][case % 3], 2 + case % 3, 6, true).map_err(e2s)?;
        let n = l.connection().constant_term().unwrap();
        ensure(!n.is_zero(), || format!("case {case}: generator gave N = 0"))?;
        let v = is_nonsingular(&l).map_err(e2s)?;
        ensure(!v.nonsingular, || format!("case {case}: nonzero residue judged non-singular"))?;
        ensure(v.witness == Witness::Monodromy(n), || format!("case {case}: wrong witness"))?;
    }
    Ok("50 + 50 modules".into())
}

fn mobius(n: u64) -> i64 {
    let (mut n, mut k, mut mu) = (n, 2, 1);
    while k * k <= n {
        if n % k == 0 {
            n /= k;
            if n % k == 0 {
                return 0;
            }
            mu = -mu;
        }
        k += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// 6. Hall basis dimensions equal the necklace formula.
fn witt_dims() -> Outcome {
    for g in 1..=6u64 {
        for level in 1..=4usize {
            let dims = hall_basis(g as usize, level).map_err(e2s)?.dims;
            for n in 1..=level as u64 {
                let necklace: i64 =
                    (1..=n).filter(|d| n % d == 0).map(|d| mobius(d) * (g as i64).pow((n / d) as u32)).sum::<i64>() / n as i64;
                ensure(dims[n as usize - 1] as i64 == necklace, || format!("g = {g}, n = {n}: {} vs {necklace}", dims[n as usize - 1]))?;
                ensure(witt_dimension(g, n as u32) as i64 == necklace, || format!("witt_dimension({g}, {n})"))?;
            }
        }
    }
    let g4 = hall_basis(4, 4).map_err(e2s)?.dims;
    ensure(g4 == [4, 6, 20, 60], || format!("g = 4 gives {g4:?}"))?;
    Ok("g <= 6, L <= 4; g = 4 -> 4, 6, 20, 60".into())
}

/// 7. The abelianization of the free level-4 model recovers `H1`.
fn abelianization() -> Outcome {
    let mut g = Gen::new(7);
    for case in 0..50 {
        let qv = [2u64, 3, 4, 5, 9][case % 5];
        let h1 = g.phin_module(qv, 1 + case % 3);
        let data = NilpotentLieData::free_nilpotent(&h1, 4).map_err(e2s)?;
        ensure(data.abelianization().map_err(e2s)? == h1, || format!("case {case}: abelianization differs from H1"))?;
    }
    Ok("50 random H1 of dim 1-3 at level 4".into())
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// 8. Monodromy supported in degree 2: invisible on `H1`, visible at level 4.
fn degree_two_separation() -> Outcome {
    let frozen: LieWire = serde_json::from_str(&std::fs::read_to_string(fixture("lie_degree_two.json")).map_err(e2s)?).map_err(e2s)?;
    let frozen = NilpotentLieData::try_from(&frozen).map_err(e2s)?;
    ensure(frozen == degree_two_monodromy_example(3).map_err(e2s)?, || "frozen fixture differs from the constructor".into())?;
    ensure(frozen.validate().passed(), || "fixture does not validate".into())?;
    let ab = frozen.abelianization().map_err(e2s)?;
    ensure(ab.n().is_zero(), || "N is nonzero on the abelianization".into())?;
    let verdict = frozen.good_reduction_verdict().map_err(e2s)?;
    ensure(!verdict.good, || "verdict is good".into())?;
    Ok("abelian N = 0, level-4 verdict bad".into())
}

/// 9. Tensor, dual and gauge preserve the invariants.
fn preservation() -> Outcome {
    let mut g = Gen::new(9);
    for case in 0..100 {
        let qv = [2u64, 3, 5, 9][case % 4];
        let (v, w) = (g.phin_module(qv, 1 + case % 3), g.phin_module(qv, 1 + (case / 3) % 3));
        for (name, x) in [("tensor", v.tensor(&w)), ("dual", v.dual()), ("sum", v.direct_sum(&w))] {
            let x = x.map_err(e2s)?;
            ensure(x.validate().passed(), || format!("(Phi, N) case {case}: {name} fails"))?;
        }
        let c = g.invertible_matrix(v.dim());
        ensure(v.conjugate(&c).map_err(e2s)?.validate().passed(), || format!("(Phi, N) case {case}: conjugate fails"))?;
    }
    let check = |m: &PhiNablaModule, what: &str, case: usize| -> Result<(), String> {
        let r = m.validate();
        ensure(r.passed(), || format!("module case {case}: {what} fails: {:?}", r.failures().next()))
    };
    for case in 0..100 {
        let p = [2, 3, 5][case % 3];
        let frob = g.any_frobenius(p, 14);
        let a = g.sk_module_with(&frob, 1 + case % 2, 8).map_err(e2s)?;
        let b = g.sk_module_with(&frob, 1 + (case / 2) % 2, 8).map_err(e2s)?;
        check(&a.tensor(&b).map_err(e2s)?, "tensor", case)?;
        check(&a.dual().map_err(e2s)?, "dual", case)?;
        let unit = g.power_series_unit(p, a.rank(), 8);
        check(&a.gauge_transform(&unit).map_err(e2s)?, "gauge over S_K", case)?;
        let wide = g.sk_module_with(&frob, 1 + case % 2, 12).map_err(e2s)?;
        let unit = g.laurent_unit(p, wide.rank(), 20);
        check(&wide.base_change().map_err(e2s)?.gauge_transform(&unit).map_err(e2s)?, "Laurent gauge", case)?;
    }
    Ok("100 (Phi, N) and 100 module cases".into())
}

fn run_bin(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_frobmod")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

/// 10. Byte-identical reruns and report round trip over the fixture corpus.
fn cli_determinism() -> Outcome {
    let mut runs = 0;
    let mut names: Vec<PathBuf> = std::fs::read_dir(fixture("")).map_err(e2s)?.map(|e| e.unwrap().path()).collect();
    names.sort();
    let commands = ["validate", "cohomology", "residue", "nonsingular", "verdict"];
    for path in &names {
        for cmd in commands {
            let args = [cmd, path.to_str().unwrap()];
            let (c1, o1) = run_bin(&args);
            let (c2, o2) = run_bin(&args);
            runs += 2;
            ensure(c1 == c2 && o1 == o2, || format!("{cmd} {}: reruns differ", path.display()))?;
            let v: serde_json::Value =
                serde_json::from_slice(&o1).map_err(|e| format!("{cmd} {}: report is not JSON: {e}", path.display()))?;
            ensure(v["version"] == frobmod::json::SCHEMA_VERSION, || format!("{cmd} {}: missing version", path.display()))?;
            ensure(serde_json::to_vec_pretty(&v).map_err(e2s)?.len() + 1 == o1.len(), || {
                format!("{cmd} {}: not canonical", path.display())
            })?;
        }
        // modules re-serialize to the same bytes
        let text = std::fs::read_to_string(path).map_err(e2s)?;
        if let Ok(w) = serde_json::from_str::<ModuleWire>(&text) {
            let m = AnyModule::try_from(&w).map_err(e2s)?;
            let again = serde_json::to_string_pretty(&ModuleWire::from(&m)).map_err(e2s)? + "\n";
            ensure(again == text, || format!("{}: module does not round-trip", path.display()))?;
        }
    }
    for args in [["ranks", "--g", "2", "--level", "3"], ["ranks", "--g", "3", "--level", "4"]] {
        let (a, b) = (run_bin(&args), run_bin(&args));
        runs += 2;
        ensure(a == b, || format!("{args:?}: reruns differ"))?;
    }
    Ok(format!("{} fixtures, {runs} runs", names.len()))
}

trait GenExt {
    fn rng_range(&mut self, lo: usize, hi: usize) -> usize;
}

impl GenExt for Gen {
    fn rng_range(&mut self, lo: usize, hi: usize) -> usize {
        use rand::Rng;
        self.rng().random_range(lo..=hi)
    }
}

fn main() {
    type Criterion = (&'static str, u64, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("commutation law", 5, commutation_law),
        ("complex property d1 d0 = 0", 30, complex_property),
        ("finite cohomology vs rank oracle", 5, finite_bullets),
        ("residue relation", 30, residue_relation),
        ("non-singularity round trip", 10, nonsingular_round_trip),
        ("Witt dimensions", 5, witt_dims),
        ("abelianization", 5, abelianization),
        ("degree-two monodromy separation", 1, degree_two_separation),
        ("tensor/dual/gauge preservation", 30, preservation),
        ("CLI determinism and round trip", 10, cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*limit);
        let (status, note) = match (&result, over) {
            (Ok(n), false) => ("PASS", n.clone()),
            (Ok(n), true) => ("FAIL", format!("{n}; over the time limit")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("[{status}] {:>2}. {name:<34} {:>7.2}s / {limit}s  {note}", i + 1, elapsed.as_secs_f64());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
