use frobmod::frobenius::FrobeniusLift;
use frobmod::gen::Gen;
use frobmod::linalg::q;
use frobmod::padic::{PAdicScalar, Precision, Q};
use frobmod::series::{RingTag, TruncatedSeries};
use num_bigint::BigInt;
use proptest::prelude::*;

fn prime() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 3, 5, 7])
}

fn ring() -> impl Strategy<Value = RingTag> {
    prop::sample::select(vec![RingTag::Plus, RingTag::Laurent])
}

fn series(g: &mut Gen, p: u32, ring: RingTag, prec: Precision) -> TruncatedSeries {
    let lo = if ring == RingTag::Plus { 0 } else { -4 };
    g.series_with(p, ring, lo, 10, 0.6, prec)
}

type Op = fn(&TruncatedSeries, &TruncatedSeries, &FrobeniusLift) -> Option<TruncatedSeries>;

fn pow(p: u32, m: i64) -> Q {
    Q::from_integer(BigInt::from(p).pow(m as u32))
}

/// Move every coefficient by a random multiple of `p^precision`.
fn perturb(g: &mut Gen, f: &TruncatedSeries) -> TruncatedSeries {
    let p = f.p();
    let coeffs = f
        .coeffs()
        .iter()
        .map(|c| match c.precision() {
            Precision::Abs(m) => PAdicScalar::new(p, c.value() + pow(p, m) * q(g.int(3)), c.precision()),
            Precision::Exact => c.clone(),
        })
        .collect();
    TruncatedSeries::new(p, f.ring(), f.lo(), f.hi(), coeffs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn leibniz(seed: u64, p in prime(), ring in ring()) {
        let mut g = Gen::new(seed);
        let (f, h) = (series(&mut g, p, ring, Precision::Abs(10)), series(&mut g, p, ring, Precision::Exact));
        let lhs = f.mul(&h).unwrap().derive();
        let rhs = f.mul(&h.derive()).unwrap().add(&h.mul(&f.derive()).unwrap()).unwrap();
        prop_assert!(lhs.eq_within_precision(&rhs), "mismatch at {:?}", lhs.first_mismatch(&rhs));
    }

    #[test]
    fn frobenius_commutes_with_derivation(seed: u64, p in prime(), ring in ring()) {
        let mut g = Gen::new(seed);
        let sigma = g.any_frobenius(p, 60);
        let f = series(&mut g, p, ring, Precision::Abs(12));
        let lhs = sigma.apply(&f).unwrap().derive();
        let rhs = sigma.sigma_t_derivative().mul(&sigma.apply(&f.derive()).unwrap()).unwrap();
        prop_assert!(lhs.eq_within_precision(&rhs));
        // log version, with a log factor congruent to q mod t
        let lam = sigma.log_factor();
        let lam0 = lam.coeff(0).unwrap();
        prop_assert_eq!(lam0.value(), &q(sigma.q() as i64));
        let lhs = sigma.apply(&f).unwrap().log_derive();
        let rhs = lam.mul(&sigma.apply(&f.log_derive()).unwrap()).unwrap();
        prop_assert!(lhs.eq_within_precision(&rhs));
    }

    #[test]
    fn antiderivative_inverts_derive(seed: u64, p in prime()) {
        let mut g = Gen::new(seed);
        let f = series(&mut g, p, RingTag::Plus, Precision::Exact);
        let back = f.derive().antiderivative().unwrap();
        let mut expect = f.clone();
        expect = expect.sub(&TruncatedSeries::constant(p, RingTag::Plus, f.coeff(0).unwrap(), f.hi())).unwrap();
        prop_assert!(back.series.eq_within_precision(&expect));
        // every division by a multiple of p is recorded
        for (e, v) in back.precision_loss {
            prop_assert!(e % p as i64 == 0 && v >= 1);
        }
    }

    #[test]
    fn claimed_precision_is_justified(seed: u64, p in prime(), ring in ring(), m in 4i64..10) {
        // perturbing inputs inside their precision moves outputs only inside
        // the precision the outputs claim
        let mut g = Gen::new(seed);
        let sigma = FrobeniusLift::standard(p, p as u64, 40).unwrap();
        let f = series(&mut g, p, ring, Precision::Abs(m));
        let h = series(&mut g, p, ring, Precision::Abs(m));
        let (f2, h2) = (perturb(&mut g, &f), perturb(&mut g, &h));
        let ops: Vec<(&str, Op)> = vec![
            ("add", |a, b, _| a.add(b).ok()),
            ("mul", |a, b, _| a.mul(b).ok()),
            ("derive", |a, _, _| Some(a.derive())),
            ("sigma", |a, _, s| s.apply(a).ok()),
            ("invert", |a, _, _| a.add(&TruncatedSeries::one(a.p(), a.ring(), a.hi())).ok()?.invert_unit().ok()),
        ];
        for (name, op) in ops {
            let (Some(x), Some(y)) = (op(&f, &h, &sigma), op(&f2, &h2, &sigma)) else { continue };
            let (lo, hi) = x.common_window(&y);
            for e in lo..=hi {
                let (a, b) = (x.coeff(e).unwrap(), y.coeff(e).unwrap());
                prop_assert!(b.clone().with_precision(a.precision()).congruent(&a), "{} at t^{}: {} vs {}", name, e, a, b);
            }
        }
    }

    #[test]
    fn exact_inputs_stay_exact(seed: u64, p in prime(), ring in ring()) {
        let mut g = Gen::new(seed);
        let (f, h) = (series(&mut g, p, ring, Precision::Exact), series(&mut g, p, ring, Precision::Exact));
        prop_assert!(f.mul(&h).unwrap().is_exact());
        prop_assert!(f.add(&h).unwrap().is_exact());
        prop_assert!(f.derive().is_exact());
    }
}
