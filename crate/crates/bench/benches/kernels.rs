use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use secondkind::bochner::{curvature_term, weitzenbock_oracle};
use secondkind::curvature::random_curvature;
use secondkind::implications::sampled_isotropic_minimum;
use secondkind::kahler::{kahler_project, ComplexStructure};
use secondkind::sampling::rng;
use secondkind::{induce_second_kind, Dim, FrameSearch};

fn second_kind(c: &mut Criterion) {
    let mut group = c.benchmark_group("induce_second_kind");
    for n in [4, 6, 8, 10] {
        let r = random_curvature(Dim::new(n).unwrap(), 1, 1.0);
        group.bench_with_input(BenchmarkId::from_parameter(n), &r, |b, r| {
            b.iter(|| induce_second_kind(black_box(r)))
        });
    }
    group.finish();
}

fn bochner(c: &mut Criterion) {
    let mut group = c.benchmark_group("curvature_term");
    for (n, p) in [(5, 2), (6, 3), (8, 4)] {
        let r = random_curvature(Dim::new(n).unwrap(), 2, 1.0);
        group.bench_with_input(
            BenchmarkId::new("second_kind", format!("{n}-{p}")),
            &r,
            |b, r| b.iter(|| curvature_term(black_box(r), p).unwrap()),
        );
        group.bench_with_input(
            BenchmarkId::new("oracle", format!("{n}-{p}")),
            &r,
            |b, r| b.iter(|| weitzenbock_oracle(black_box(r), p).unwrap()),
        );
    }
    group.finish();
}

fn isotropic(c: &mut Criterion) {
    let r = random_curvature(Dim::new(4).unwrap(), 3, 1.0);
    c.bench_function("sampled_isotropic_minimum/4", |b| {
        let mut g = rng(4);
        b.iter(|| sampled_isotropic_minimum(black_box(&r), FrameSearch::default(), &mut g).unwrap())
    });
}

fn kahler(c: &mut Criterion) {
    let mut group = c.benchmark_group("kahler_project");
    for m in [2, 3] {
        let r = random_curvature(Dim::new(2 * m).unwrap(), 5, 1.0);
        let j = ComplexStructure::standard(m);
        group.bench_with_input(BenchmarkId::from_parameter(m), &r, |b, r| {
            b.iter(|| kahler_project(black_box(r), &j, 200).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, second_kind, bochner, isotropic, kahler);
criterion_main!(benches);
