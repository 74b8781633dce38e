use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use frobmod::frobcoh::{cohomology, SeriesWindow};
use frobmod::gen::Gen;
use frobmod::linalg::QMatrix;
use frobmod::phinabla::solve_frobenius;
use frobmod::pi1::{rank_report, RankOracle};

fn modules(c: &mut Criterion) {
    let mut g = Gen::new(2);
    let m = g.sk_module(3, 2, 10).unwrap();
    c.bench_function("validate/sk_rank2", |b| b.iter(|| black_box(m.validate())));
    c.bench_function("solve_frobenius/rank2_window10", |b| {
        b.iter(|| black_box(solve_frobenius(m.connection(), &QMatrix::identity(2), m.frob(), 10).unwrap()))
    });
    let window = SeriesWindow { lo: 0, hi: 6, margin: 1 };
    c.bench_function("cohomology/sk_rank2", |b| b.iter(|| black_box(cohomology(&m, window, None).unwrap())));
    let e = g.edagger_module(5, 2, 8).unwrap();
    c.bench_function("validate/edagger_rank2", |b| b.iter(|| black_box(e.validate())));
}

fn ranks(c: &mut Criterion) {
    c.bench_function("ranks/g2_level4", |b| b.iter(|| black_box(rank_report(2, 4, RankOracle::Euler).unwrap())));
}

criterion_group!(benches, modules, ranks);
criterion_main!(benches);
