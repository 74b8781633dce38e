//! Seeded random objects for tests, benches and the CLI's `--seed`.
//!
//! Everything is exact unless a precision is asked for, so generated modules
//! go through the order-by-order solvers and validate on the nose.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::frobenius::FrobeniusLift;
use crate::linalg::{q, QMatrix};
use crate::monodromy::PhiNModule;
use crate::padic::{PAdicScalar, Precision, Q};
use crate::phinabla::{solve_frobenius, solve_log_frobenius, BaseRing, LogPhiNablaModule, PhiNablaModule};
use crate::series::{RingTag, TruncatedSeries};
use crate::smatrix::SeriesMatrix;

/// Extra exponents carried by the `S_K` module behind an `E^dagger` one:
/// Laurent gauges with `q = 5` push valuations of `A` down to about `-8`,
/// and inverting such matrices spends relative precision.
const EDAGGER_SLACK: i64 = 6;
const EDAGGER_ATTEMPTS: usize = 8;

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn pick<T: Copy>(&mut self, choices: &[T]) -> T {
        choices[self.rng.random_range(0..choices.len())]
    }

    pub fn int(&mut self, bound: i64) -> i64 {
        self.rng.random_range(-bound..=bound)
    }

    /// `n / d` with `|n| <= 3`, `1 <= d <= 3`.
    pub fn small_rational(&mut self) -> Q {
        let n = self.int(3);
        let d = self.rng.random_range(1..=3i64);
        Q::new(n.into(), d.into())
    }

    pub fn integer_matrix(&mut self, rows: usize, cols: usize, bound: i64) -> QMatrix {
        let mut m = QMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = q(self.int(bound));
            }
        }
        m
    }

    /// Product of random lower and upper unitriangular matrices with a
    /// nonzero diagonal in between.
    pub fn invertible_matrix(&mut self, n: usize) -> QMatrix {
        let l = QMatrix::from_fn(n, n, |i, j| if i == j { q(1) } else { q(0) });
        let mut lower = l.clone();
        let mut upper = l;
        let mut diag = Vec::with_capacity(n);
        for i in 0..n {
            for j in 0..n {
                if i > j {
                    lower[(i, j)] = q(self.int(2));
                } else if i < j {
                    upper[(i, j)] = q(self.int(2));
                }
            }
            let mut d = 0;
            while d == 0 {
                d = self.int(3);
            }
            diag.push(q(d));
        }
        lower.mul(&QMatrix::diagonal(&diag)).mul(&upper)
    }

    /// Exact series on `[lo, hi]`, each coefficient nonzero with probability
    /// `density`.
    pub fn series(&mut self, p: u32, ring: RingTag, lo: i64, hi: i64, density: f64) -> TruncatedSeries {
        self.series_with(p, ring, lo, hi, density, Precision::Exact)
    }

    /// Like [`series`](Self::series) with every coefficient carrying
    /// `precision`; values are `p`-integral.
    pub fn series_with(&mut self, p: u32, ring: RingTag, lo: i64, hi: i64, density: f64, precision: Precision) -> TruncatedSeries {
        let coeffs = (lo..=hi)
            .map(|_| {
                let v = if self.rng.random_bool(density) { self.coefficient(p, precision) } else { q(0) };
                PAdicScalar::new(p, v, precision)
            })
            .collect();
        TruncatedSeries::new(p, ring, lo, hi, coeffs).expect("window is well formed")
    }

    fn coefficient(&mut self, p: u32, precision: Precision) -> Q {
        match precision {
            // avoid denominators divisible by p so values stay integral
            Precision::Abs(_) => {
                let n = self.int(50);
                let mut d = self.rng.random_range(1..=5i64);
                while d % p as i64 == 0 {
                    d += 1;
                }
                Q::new(n.into(), d.into())
            }
            Precision::Exact => self.small_rational(),
        }
    }

    /// `sigma(t) = u t^q` with `u = 1 + p (random integral series)`.
    pub fn frobenius(&mut self, p: u32, q_exp: u32, window: i64) -> FrobeniusLift {
        let q = (p as u64).pow(q_exp.max(1));
        let mut vals = vec![1i64];
        for _ in 1..=window {
            vals.push(p as i64 * self.int(2));
        }
        let u = TruncatedSeries::from_ints(p, RingTag::Plus, 0, &vals, window).expect("window is well formed");
        FrobeniusLift::new(q, u).expect("u is a 1-unit")
    }

    /// Either the standard lift or a random one, with `q = p`.
    pub fn any_frobenius(&mut self, p: u32, window: i64) -> FrobeniusLift {
        if self.rng.random_bool(0.5) {
            FrobeniusLift::standard(p, p as u64, window).expect("q = p")
        } else {
            self.frobenius(p, 1, window)
        }
    }

    fn sparse_matrix(&mut self, p: u32, rank: usize, lo: i64, hi: i64, density: f64) -> SeriesMatrix {
        let entries = (0..rank * rank).map(|_| self.series(p, RingTag::Plus, lo, hi, density)).collect();
        SeriesMatrix::new(rank, rank, entries).expect("shape matches")
    }

    /// Validated module over `S_K`: random `G`, random invertible `A(0)`,
    /// `A` solved order by order up to `t^window`.
    pub fn sk_module(&mut self, p: u32, rank: usize, window: i64) -> Result<PhiNablaModule> {
        let frob = self.any_frobenius(p, window + 2);
        self.sk_module_with(&frob, rank, window)
    }

    pub fn sk_module_with(&mut self, frob: &FrobeniusLift, rank: usize, window: i64) -> Result<PhiNablaModule> {
        let p = frob.p();
        let g = self.sparse_matrix(p, rank, 0, window, 0.35);
        let a0 = self.invertible_matrix(rank);
        let a = solve_frobenius(&g, &a0, frob, window)?;
        PhiNablaModule::new(BaseRing::SK, g.truncate(window), a, frob.clone())
    }

    /// Unit of `S_K`: an invertible constant plus random higher terms.
    pub fn power_series_unit(&mut self, p: u32, rank: usize, hi: i64) -> SeriesMatrix {
        let c = self.invertible_matrix(rank);
        let mut entries = Vec::with_capacity(rank * rank);
        for i in 0..rank {
            for j in 0..rank {
                let mut s = self.series(p, RingTag::Plus, 0, hi, 0.3);
                let mut vals = s.coeffs().to_vec();
                vals[0] = PAdicScalar::exact(p, c[(i, j)].clone());
                s = TruncatedSeries::new(p, RingTag::Plus, 0, hi, vals).expect("same window");
                entries.push(s);
            }
        }
        SeriesMatrix::new(rank, rank, entries).expect("shape matches")
    }

    /// Laurent polynomial unit `D U` with `D = diag(t^k_i)`, `|k_i| <= 1`,
    /// and `U` unipotent upper triangular with entries supported on
    /// `[-1, 1]` next to the diagonal and on `[0, 1]` further out. Being exact polynomials, the entries are known up to `hi`.
    pub fn laurent_unit(&mut self, p: u32, rank: usize, hi: i64) -> SeriesMatrix {
        let ring = RingTag::Laurent;
        let mut entries = Vec::with_capacity(rank * rank);
        for i in 0..rank {
            for j in 0..rank {
                let s = if i < j {
                    // t^-1 only next to the diagonal, so that U^-1 stays shallow
                    let from = if j == i + 1 { -1 } else { 0 };
                    let terms = (from..=1)
                        .map(|e| (e, PAdicScalar::exact(p, if self.rng.random_bool(0.4) { self.small_rational() } else { q(0) })))
                        .collect();
                    TruncatedSeries::from_terms(p, ring, from, hi, terms).expect("window contains the support")
                } else if i == j {
                    let e = self.int(1);
                    TruncatedSeries::monomial(p, ring, PAdicScalar::from_int(p, 1), e, e.min(0), hi).expect("window contains e")
                } else {
                    TruncatedSeries::zero(p, ring, 0, hi)
                };
                entries.push(s);
            }
        }
        SeriesMatrix::new(rank, rank, entries).expect("shape matches")
    }

    /// Validated module over `E^dagger`: an `S_K` module known past
    /// `t^window`, gauged by a Laurent polynomial unit so that `G` and `A`
    /// have genuine negative powers; the result is cut back to `t^window`.
    /// Draws again (a bounded number of times)
    /// when the truncation is too short to certify that `A` is invertible.
    pub fn edagger_module(&mut self, p: u32, rank: usize, window: i64) -> Result<PhiNablaModule> {
        let mut last = None;
        for _ in 0..EDAGGER_ATTEMPTS {
            let frob = self.any_frobenius(p, window + EDAGGER_SLACK + 4);
            let m = self.sk_module_with(&frob, rank, window + EDAGGER_SLACK)?.base_change()?;
            let unit = self.laurent_unit(p, rank, window + EDAGGER_SLACK + 8);
            let m = m.gauge_transform(&unit)?;
            let m = PhiNablaModule::new(BaseRing::EDagger, m.connection().truncate(window), m.frobenius_matrix().truncate(window), frob)?;
            // only an uncertified inverse is redrawn; a broken invariant is returned
            let report = m.validate();
            if report.failures().all(|c| c.name == "frobenius_invertible") {
                match report.into_result() {
                    Ok(()) => return Ok(m),
                    Err(e) => last = Some(e),
                }
            } else {
                report.into_result()?;
            }
        }
        Err(last.expect("at least one attempt"))
    }

    /// Validated log module with prescribed residue shape: weights `w_i`,
    /// `A(0) = C^-1 diag(q^w_i) C`, `N = C^-1 N_0 C` with `N_0` supported on
    /// weight jumps of one, and random higher terms of `G_log`.
    pub fn log_module(&mut self, p: u32, rank: usize, window: i64, force_monodromy: bool) -> Result<LogPhiNablaModule> {
        let frob = self.any_frobenius(p, window + 2);
        let qq = frob.q() as i64;
        let mut weights: Vec<u32> = (0..rank).map(|_| self.rng.random_range(0..=2)).collect();
        if force_monodromy && rank >= 2 && !weights.windows(2).any(|w| w[0] + 1 == w[1]) {
            weights[1] = weights[0] + 1;
        }
        let a0 = QMatrix::diagonal(&weights.iter().map(|&w| q(qq.pow(w))).collect::<Vec<_>>());
        let mut n0 = QMatrix::zeros(rank, rank);
        for i in 0..rank {
            for j in 0..rank {
                if weights[j] == weights[i] + 1 {
                    n0[(i, j)] = q(self.int(2));
                }
            }
        }
        if force_monodromy && n0.is_zero() {
            if let Some((i, j)) = (0..rank).flat_map(|i| (0..rank).map(move |j| (i, j))).find(|&(i, j)| weights[j] == weights[i] + 1) {
                n0[(i, j)] = q(1);
            }
        }
        let c = self.invertible_matrix(rank);
        let cinv = c.inverse().expect("invertible by construction");
        let a0 = cinv.mul(&a0).mul(&c);
        let n = cinv.mul(&n0).mul(&c);
        let mut g = self.sparse_matrix(p, rank, 0, window, 0.35);
        for i in 0..rank {
            for j in 0..rank {
                let s = g.get(i, j);
                let mut vals: Vec<PAdicScalar> = s.coeffs().to_vec();
                vals[0] = PAdicScalar::exact(p, n[(i, j)].clone());
                g.set(i, j, TruncatedSeries::new(p, RingTag::Plus, 0, window, vals)?);
            }
        }
        let a = solve_log_frobenius(&g, &a0, &frob, window)?;
        LogPhiNablaModule::new(g, a, frob)
    }

    /// Random valid `(Phi, N)`-module, assembled like the log residues.
    pub fn phin_module(&mut self, q_value: u64, dim: usize) -> PhiNModule {
        let qq = q_value as i64;
        let weights: Vec<u32> = (0..dim).map(|_| self.rng.random_range(0..=2)).collect();
        let phi = QMatrix::diagonal(
            &weights.iter().map(|&w| q(qq.pow(w)) * Q::from_integer(BigInt::from(self.pick(&[1i64, -1])))).collect::<Vec<_>>(),
        );
        let mut n = QMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                // N Phi = q Phi N on the diagonal: phi_j = q phi_i
                if phi[(j, j)] == &phi[(i, i)] * q(qq) {
                    n[(i, j)] = q(self.int(2));
                }
            }
        }
        let c = self.invertible_matrix(dim);
        PhiNModule::new(q_value, phi, n).and_then(|v| v.conjugate(&c)).expect("valid by construction")
    }
}
