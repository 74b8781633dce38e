use frobmod::frobcoh::{cohomology, cohomology_finite, CMComplex, CohomologyDim, SeriesWindow};
use frobmod::gen::Gen;
use frobmod::linalg::{q, QMatrix};
use frobmod::smatrix::SeriesMatrix;
use proptest::prelude::*;

/// Frobenius-like matrix with prescribed multiplicity of the eigenvalue 1.
fn phi_with_fixed(g: &mut Gen, n: usize, fixed: usize) -> QMatrix {
    let qq = g.pick(&[2i64, 3, 5]);
    let mut d = QMatrix::identity(n);
    for i in fixed..n {
        d[(i, i)] = q(qq.pow(1 + (i % 2) as u32));
    }
    // unipotent block on the fixed part keeps ker(Phi - 1) smaller than the multiplicity
    if fixed >= 2 && g.int(1) == 1 {
        d[(0, 1)] = q(1);
    }
    let c = g.invertible_matrix(n);
    c.inverse().unwrap().mul(&d).mul(&c)
}

fn dims(r: &frobmod::frobcoh::CohomologyReport) -> [usize; 3] {
    [r.h0.value(), r.h1.value(), r.h2.value()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn finite_dims(seed: u64, n0 in 1usize..4, n1 in 1usize..5) {
        let mut g = Gen::new(seed);
        let f0 = g.int(n0 as i64) as usize;
        let f1 = g.int(n1 as i64) as usize;
        let (phi0, phi1) = (phi_with_fixed(&mut g, n0, f0.min(n0)), phi_with_fixed(&mut g, n1, f1.min(n1)));
        let r = cohomology_finite(&phi0, &phi1);
        let k0 = n0 - phi0.sub(&QMatrix::identity(n0)).rank();
        let k1 = n1 - phi1.sub(&QMatrix::identity(n1)).rank();
        // square maps: kernel and cokernel have equal dimension
        prop_assert_eq!(dims(&r), [k0, k0 + k1, k1]);
        prop_assert_eq!(r.h0.value() + r.h2.value(), r.h1.value());
        for i in 3..6 {
            prop_assert_eq!(r.dim(i), CohomologyDim::Exact { value: 0 });
        }
        // basis changes on either side do not move the dimensions
        let (c0, c1) = (g.invertible_matrix(n0), g.invertible_matrix(n1));
        let conj = |c: &QMatrix, m: &QMatrix| c.inverse().unwrap().mul(m).mul(c);
        prop_assert_eq!(dims(&cohomology_finite(&conj(&c0, &phi0), &conj(&c1, &phi1))), dims(&r));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn complex_squares_to_zero(seed: u64) {
        let mut g = Gen::new(seed);
        let m = g.sk_module(3, 2, 6).unwrap();
        let c = CMComplex::build_seeded(&m, seed).unwrap();
        let v = SeriesMatrix::new(2, 1, (0..2).map(|_| g.series(3, m.ring().tag(), 0, 4, 0.6)).collect()).unwrap();
        prop_assert_eq!(c.composition_defect(&v).unwrap(), None);
    }

    #[test]
    fn series_h0_is_gauge_invariant(seed: u64) {
        let mut g = Gen::new(seed);
        let m = g.sk_module(3, 2, 8).unwrap();
        let u = g.power_series_unit(3, 2, 8);
        let m2 = m.gauge_transform(&u).unwrap();
        let window = SeriesWindow { lo: 0, hi: 5, margin: 1 };
        let (a, b) = (cohomology(&m, window, None).unwrap(), cohomology(&m2, window, None).unwrap());
        prop_assert_eq!(a.h0, b.h0);
        prop_assert_eq!(a.dim(3), CohomologyDim::Exact { value: 0 });
    }
}
