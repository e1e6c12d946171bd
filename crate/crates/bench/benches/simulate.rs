use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ztnd_core::linalg::{self, Matrix};
use ztnd_core::problem::example1;
use ztnd_core::{simulate, track, AoAScenario, IntegratorConfig, ModelKind, ModelSpec, NoiseModel, Vector};

fn one_second() -> IntegratorConfig {
    IntegratorConfig {
        horizon: 1.0,
        ..Default::default()
    }
}

fn models(c: &mut Criterion) {
    let p = example1();
    let init = Vector::from([1.0, -1.0]);
    let cfg = one_second();
    let mut group = c.benchmark_group("example1_1s");
    for kind in ModelKind::ALL {
        group.bench_with_input(BenchmarkId::from_parameter(kind), &kind, |b, &kind| {
            let spec = ModelSpec::new(kind);
            b.iter(|| simulate(&spec, &p, &NoiseModel::None, black_box(&init), &cfg).unwrap())
        });
    }
    group.finish();
}

fn noise(c: &mut Criterion) {
    let p = example1();
    let init = Vector::from([1.0, -1.0]);
    let cfg = one_second();
    let spec = ModelSpec::new(ModelKind::Aztnd);
    let random = NoiseModel::bounded_random(0.5, 3.0, 1).unwrap();
    c.bench_function("aztnd_random_noise_1s", |b| {
        b.iter(|| simulate(&spec, &p, &random, black_box(&init), &cfg).unwrap())
    });
}

fn tracking(c: &mut Criterion) {
    let sc = AoAScenario::default_scenario(1.0).unwrap();
    let cfg = one_second();
    let spec = ModelSpec::new(ModelKind::Aztnd);
    c.bench_function("aoa_aztnd_1s", |b| {
        b.iter(|| track(&spec, &sc, &NoiseModel::None, black_box((1.0, 1.0)), &cfg).unwrap())
    });
}

fn solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    for n in [2usize, 4, 8] {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            n as f64 + 1.0
                        } else {
                            1.0 / (1 + i + j) as f64
                        }
                    })
                    .collect()
            })
            .collect();
        let a = Matrix::from_rows(&rows);
        let b = Vector::new((0..n).map(|i| i as f64 - 1.0).collect());
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| linalg::solve(black_box(&a), black_box(&b)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, models, noise, tracking, solve);
criterion_main!(benches);
