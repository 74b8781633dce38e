use frobmod::gen::Gen;
use frobmod::linalg::{q, QMatrix};
use frobmod::monodromy::{is_nonsingular, residue};
use frobmod::phinabla::{LogPhiNablaModule, PhiNablaModule};
use frobmod::smatrix::SeriesMatrix;
use proptest::prelude::*;

fn prime() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 3, 5])
}

fn same(a: &SeriesMatrix, b: &SeriesMatrix) -> bool {
    a.eq_within_precision(b)
}

fn pair(g: &mut Gen, p: u32) -> (PhiNablaModule, PhiNablaModule) {
    let frob = g.frobenius(p, 1, 8);
    (g.sk_module_with(&frob, 1, 6).unwrap(), g.sk_module_with(&frob, 2, 6).unwrap())
}

fn assert_valid(name: &str, m: &PhiNablaModule) -> Result<(), TestCaseError> {
    let r = m.validate();
    prop_assert!(r.passed(), "{name}: {:?}", r.failures().collect::<Vec<_>>());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn constructions_stay_valid(seed: u64, p in prime()) {
        let mut g = Gen::new(seed);
        let (m1, m2) = pair(&mut g, p);
        let u = g.power_series_unit(p, 2, 6);
        assert_valid("gauge", &m2.gauge_transform(&u).unwrap())?;
        assert_valid("tensor", &m1.tensor(&m2).unwrap())?;
        assert_valid("dual", &m2.dual().unwrap())?;
        assert_valid("sum", &m1.direct_sum(&m2).unwrap())?;
        assert_valid("base change", &m2.base_change().unwrap())?;
    }

    #[test]
    fn dual_of_tensor(seed: u64, p in prime()) {
        let mut g = Gen::new(seed);
        let (m1, m2) = pair(&mut g, p);
        let lhs = m1.tensor(&m2).unwrap().dual().unwrap();
        let rhs = m1.dual().unwrap().tensor(&m2.dual().unwrap()).unwrap();
        prop_assert!(same(lhs.connection(), rhs.connection()));
        prop_assert!(same(lhs.frobenius_matrix(), rhs.frobenius_matrix()));
    }

    #[test]
    fn log_round_trip(seed: u64, p in prime()) {
        let mut g = Gen::new(seed);
        let m = g.sk_module(p, 2, 6).unwrap();
        let l = m.to_log().unwrap();
        let back = l.from_log().unwrap();
        prop_assert!(same(back.connection(), m.connection()));
        prop_assert!(same(back.frobenius_matrix(), m.frobenius_matrix()));
        let r = residue(&l).unwrap();
        prop_assert_eq!(r.phi(), &m.frobenius_matrix().truncate(0).constant_term().unwrap());
        prop_assert!(r.n().is_zero());
    }

    #[test]
    fn nonsingular_iff_from_log(seed: u64, p in prime(), force: bool) {
        let mut g = Gen::new(seed);
        let l: LogPhiNablaModule = g.log_module(p, 2, 5, force).unwrap();
        let v = is_nonsingular(&l).unwrap();
        prop_assert_eq!(v.nonsingular, l.from_log().is_ok());
        if force {
            prop_assert!(!v.nonsingular);
        }
    }

    #[test]
    fn residue_relation(seed: u64, p in prime(), rank in 1usize..4) {
        let mut g = Gen::new(seed);
        let l = g.log_module(p, rank, 5, true).unwrap();
        let r = residue(&l).unwrap();
        let qq = q(l.frob().q() as i64);
        prop_assert_eq!(r.n().mul(r.phi()), r.phi().mul(r.n()).scale(&qq));
        prop_assert!(r.n().is_nilpotent());
    }

    #[test]
    fn phin_constructions(seed: u64, d1 in 1usize..4, d2 in 1usize..3) {
        let mut g = Gen::new(seed);
        let (a, b) = (g.phin_module(3, d1), g.phin_module(3, d2));
        for v in [a.tensor(&b).unwrap(), a.dual().unwrap(), a.direct_sum(&b).unwrap()] {
            prop_assert_eq!(v.n().mul(v.phi()), v.phi().mul(v.n()).scale(&q(3)));
            prop_assert!(v.validate().passed());
        }
        let c = g.invertible_matrix(d1);
        prop_assert_eq!(a.conjugate(&c).unwrap().n().nilpotency_index(), a.n().nilpotency_index());
    }

    #[test]
    fn conjugation_is_an_action(seed: u64) {
        let mut g = Gen::new(seed);
        let a = g.phin_module(5, 3);
        let (c1, c2) = (g.invertible_matrix(3), g.invertible_matrix(3));
        let lhs = a.conjugate(&c1).unwrap().conjugate(&c2).unwrap();
        let rhs = a.conjugate(&c1.mul(&c2)).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(a.conjugate(&QMatrix::identity(3)).unwrap(), a);
    }
}
