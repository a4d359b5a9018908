//! Benchmarks for the operations whose cost grows fastest with dimension:
//! fixed-point space extraction, anchor-projection decomposition, and the
//! Choi round-trip.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use cpmap::channel::{choi_to_kraus, random_channel, RandomKind};
use cpmap::fixedpoint::fixed_point_space;
use cpmap::structure::anchor_projections;
use cpmap::Tolerance;

fn bench_fixed_point_space(c: &mut Criterion) {
    let tol = Tolerance::default();
    let mut group = c.benchmark_group("fixed_point_space");
    for d in 2..=6usize {
        let ch = random_channel(d, 3, RandomKind::UnitalTracePreserving, 7).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(d), &ch, |b, ch| {
            b.iter(|| fixed_point_space(black_box(ch), &tol).unwrap());
        });
    }
    group.finish();
}

fn bench_anchor_projections(c: &mut Criterion) {
    let tol = Tolerance::default();
    let mut group = c.benchmark_group("anchor_projections");
    for d in 2..=6usize {
        let ch = random_channel(d, 2, RandomKind::UnitalCp, 7).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(d), &ch, |b, ch| {
            b.iter(|| anchor_projections(black_box(ch), 7, &tol).unwrap());
        });
    }
    group.finish();
}

fn bench_choi_roundtrip(c: &mut Criterion) {
    let tol = Tolerance::default();
    let mut group = c.benchmark_group("choi_roundtrip");
    for d in 2..=6usize {
        let ch = random_channel(d, 3, RandomKind::TracePreservingCp, 7).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(d), &ch, |b, ch| {
            b.iter(|| {
                let choi = black_box(ch).to_choi();
                choi_to_kraus(&choi, &tol).unwrap()
            });
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_fixed_point_space,
    bench_anchor_projections,
    bench_choi_roundtrip
);
criterion_main!(benches);
