use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use frobmod::frobenius::FrobeniusLift;
use frobmod::gen::Gen;
use frobmod::padic::Precision;
use frobmod::pi1::hall_basis;
use frobmod::series::RingTag;

fn series(c: &mut Criterion) {
    let mut g = Gen::new(1);
    let mut group = c.benchmark_group("series");
    for hi in [16i64, 32, 64] {
        let a = g.series_with(3, RingTag::Laurent, -hi / 2, hi, 0.8, Precision::Abs(20));
        let b = g.series_with(3, RingTag::Laurent, -hi / 2, hi, 0.8, Precision::Abs(20));
        group.bench_with_input(BenchmarkId::new("mul", hi), &hi, |bch, _| bch.iter(|| black_box(a.mul(&b).unwrap())));
        let sigma = FrobeniusLift::standard(3, 3, 4 * hi).unwrap();
        let plus = g.series_with(3, RingTag::Plus, 0, hi, 0.8, Precision::Abs(20));
        group.bench_with_input(BenchmarkId::new("frobenius", hi), &hi, |bch, _| bch.iter(|| black_box(sigma.apply(&plus).unwrap())));
    }
    group.finish();
}

fn lie(c: &mut Criterion) {
    let mut group = c.benchmark_group("hall_basis");
    for g in [2usize, 4] {
        group.bench_with_input(BenchmarkId::new("level4", g), &g, |bch, &g| bch.iter(|| black_box(hall_basis(g, 4).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, series, lie);
criterion_main!(benches);
