use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lmo_hardbench::{
    build_hard_instance, build_smoothed_instance, lmo_minkowski, lmo_weighted_ball, run_method, BaseKind, Method,
    PermutedFamily, ResistingOracle, WeightedBallSet,
};

/// Deterministic, dense, mixed-sign query.
fn query(d: usize) -> Vec<f64> {
    (0..d).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0 + 0.25).collect()
}

fn exact_lmo(c: &mut Criterion) {
    let mut g = c.benchmark_group("lmo_weighted_ball");
    for d in [10, 100, 1000] {
        let set = WeightedBallSet::new(d).unwrap();
        let p = query(d);
        g.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, _| {
            b.iter(|| lmo_weighted_ball(black_box(&set), black_box(&p)).unwrap())
        });
    }
    g.finish();
}

fn smoothed_lmo(c: &mut Criterion) {
    let mut g = c.benchmark_group("lmo_minkowski");
    for kind in [BaseKind::Simplex, BaseKind::WeightedBall] {
        let inst = build_smoothed_instance(kind, 100, 10.0).unwrap();
        let p = query(100);
        g.bench_function(format!("{kind:?}/100"), |b| b.iter(|| lmo_minkowski(black_box(&inst), black_box(&p)).unwrap()));
    }
    g.finish();
}

fn resisting_queries(c: &mut Criterion) {
    let d = 34;
    let family = PermutedFamily::scaled(d, 1.0, 1.0).unwrap();
    let queries: Vec<Vec<f64>> = (0..16).map(|k| query(d).into_iter().map(|v| v + k as f64 * 0.1).collect()).collect();
    c.bench_function("resisting_oracle/16_queries_d34", |b| {
        b.iter(|| {
            let mut oracle = ResistingOracle::new(family.clone());
            for q in &queries {
                black_box(oracle.query(q).unwrap());
            }
        })
    });
}

fn methods(c: &mut Criterion) {
    let mut g = c.benchmark_group("run_method_T16_d34");
    let inst = build_hard_instance(34, 1.0, 1.0).unwrap();
    for method in Method::suite() {
        g.bench_function(method.name(), |b| {
            b.iter(|| {
                let mut set = inst.set.clone();
                run_method(&inst.objective, &mut set, method, 16, 0.0).unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, exact_lmo, smoothed_lmo, resisting_queries, methods);
criterion_main!(benches);
