//! Rayon pool versus a single-thread pool on the data-parallel entry points.
//!
//! Without the `parallel` feature both arms run the sequential fallback.

use std::collections::BTreeMap;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use normdom::domination::{check_sepdom, dominate_schema, solve_sepdom_table, FuncTable, SepDomCert};
use normdom::sampling;
use normdom::topology::{build_opening_norm, BallCover, BallSpec};
use normdom::{FinVector, Flag, IndexSet, NormExpr, Scalar};
use rayon::{ThreadPool, ThreadPoolBuilder};

fn pools() -> Vec<(&'static str, ThreadPool)> {
    vec![
        ("rayon", ThreadPoolBuilder::new().build().unwrap()),
        ("sequential", ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
    ]
}

fn sepdom(c: &mut Criterion) {
    let mut rng = sampling::rng(1);
    let big = sampling::table(&mut rng, 300, 300, 1_000_000);
    let cert = solve_sepdom_table(&big);
    let tables: Vec<FuncTable> = (0..200).map(|_| sampling::table(&mut rng, 20, 20, 1000)).collect();

    let mut group = c.benchmark_group("sepdom");
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new("check_300x300", name), |b| {
            b.iter(|| pool.install(|| check_sepdom(black_box(&big), black_box(&cert)).unwrap()))
        });
        group.bench_function(BenchmarkId::new("solve_batch_200", name), |b| {
            b.iter(|| {
                pool.install(|| {
                    use rayon::prelude::*;
                    tables.par_iter().map(solve_sepdom_table).collect::<Vec<SepDomCert>>()
                })
            })
        });
    }
    group.finish();
}

fn schema(c: &mut Criterion) {
    let mut rng = sampling::rng(2);
    let schema = sampling::schema(&mut rng, 12, 8, 50);
    let slices: Vec<IndexSet> = (1..=8).map(IndexSet::range).collect();
    let samples: Vec<FinVector> = slices.iter().flat_map(|j| sampling::vectors(3, j, 20, 16)).collect();
    let reference = NormExpr::sup_norm();

    let mut group = c.benchmark_group("schema");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new("dominate_schema", name), |b| {
            b.iter(|| pool.install(|| dominate_schema(&schema, &reference, &slices, &samples).unwrap()))
        });
    }
    group.finish();
}

fn opening(c: &mut Criterion) {
    let sup = NormExpr::sup_norm();
    let ball = |center: FinVector, r: i64| BallSpec::new(center, Scalar::new(r, 2), sup.clone(), true).unwrap();
    let levels = BTreeMap::from([
        (0, vec![ball(FinVector::zero(), 3), ball(FinVector::basis(0), 2)]),
        (1, vec![ball(FinVector::basis(1), 2)]),
        (2, vec![ball(FinVector::scaled_basis(2, Scalar::new(-1, 2)), 3)]),
    ]);
    let cover = BallCover::new(Flag::standard(2), levels).unwrap();
    let samples = sampling::points_in_cover(4, &cover, 2, 20, 16).unwrap();

    let mut group = c.benchmark_group("opening");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new("build_opening_norm", name), |b| {
            b.iter(|| pool.install(|| build_opening_norm(&cover, 2, &samples).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, sepdom, schema, opening);
criterion_main!(benches);
