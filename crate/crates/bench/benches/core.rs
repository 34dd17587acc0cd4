use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use liouville_core::counterexample::{
    build_counterexample, greens_step, tabulate_seed, CounterexampleOptions, CounterexampleParams,
};
use liouville_core::criterion::{classify_divergence, q_essinf, q_hoelder, LadderOptions, Method};
use liouville_core::presets;
use liouville_core::proofsim::{averaging_harness, PsiGenerator};
use liouville_core::LogGrid;

fn q_functionals(c: &mut Criterion) {
    let spec = presets::critical_log_weight(3, 1, 2.0, -1.0);
    c.bench_function("q_essinf", |b| {
        b.iter(|| q_essinf(black_box(&spec), black_box(137.0)).unwrap())
    });
    c.bench_function("q_hoelder", |b| {
        b.iter(|| q_hoelder(black_box(&spec), black_box(137.0)).unwrap())
    });
    let ladder = LadderOptions::default();
    c.bench_function("classify_divergence_essinf", |b| {
        b.iter(|| classify_divergence(black_box(&spec), Method::EssInf, &ladder).unwrap())
    });
}

fn counterexample(c: &mut Criterion) {
    let grid = LogGrid::new(1e-3, 1e5, 4096).unwrap();
    let seed = tabulate_seed(3, -2.0, 2.0, grid).unwrap();
    c.bench_function("greens_step_4096", |b| {
        b.iter(|| greens_step(black_box(&seed), 3).unwrap())
    });
    let params = CounterexampleParams {
        n: 5,
        k: 2,
        nu: -3.0,
        lambda: 1.5,
        epsilon: 1.0,
    };
    let opts = CounterexampleOptions::default();
    c.bench_function("build_counterexample_n5_k2", |b| {
        b.iter(|| build_counterexample(black_box(params), &opts).unwrap())
    });
}

fn averaging(c: &mut Criterion) {
    let generator = PsiGenerator::default();
    c.bench_function("averaging_harness_1000", |b| {
        b.iter(|| averaging_harness(0.5, 1.5, 4.0, black_box(1000), 0, &generator).unwrap())
    });
}

criterion_group!(benches, q_functionals, counterexample, averaging);
criterion_main!(benches);
