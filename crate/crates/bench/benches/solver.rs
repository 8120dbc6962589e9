use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use fracmix::caputo_oracle::{step_mode_alpha, step_mode_beta};
use fracmix::mode_solver::{assemble, uniqueness_scan};
use fracmix::MittagLeffler;
use fracmix_bench::{demo, smooth_data, ML_POINTS};

fn ml_eval(c: &mut Criterion) {
    let mut group = c.benchmark_group("ml_eval");
    for &(name, mu, eta, z) in ML_POINTS {
        let ml = MittagLeffler::with_tolerance(mu, eta, 1e-12).unwrap();
        ml.value(z).unwrap();
        group.bench_function(name, |b| b.iter(|| ml.value(black_box(z)).unwrap()));
    }
    group.finish();
}

fn delta_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("uniqueness_scan");
    group.sample_size(10);
    for k in [64usize, 200] {
        let cfg = demo(k, 16);
        group.bench_with_input(BenchmarkId::from_parameter(k), &cfg, |b, cfg| {
            b.iter(|| uniqueness_scan(cfg).unwrap())
        });
    }
    group.finish();
}

fn assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble");
    group.sample_size(10);
    group.bench_function("demo_64", |b| b.iter(|| assemble(&demo(64, 64)).unwrap()));
    group.bench_function("smooth_64", |b| b.iter(|| assemble(&smooth_data(64, 64)).unwrap()));
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    let dt = 2f64.powi(-10);
    group.bench_function("l1_graded", |b| b.iter(|| step_mode_alpha(10.0, 0.5, dt, 1.0).unwrap()));
    group.bench_function("gl", |b| b.iter(|| step_mode_beta(10.0, 1.5, 1.0, 10.0, dt, 1.0).unwrap()));
    group.finish();
}

criterion_group!(benches, ml_eval, delta_scan, assembly, oracle);
criterion_main!(benches);
