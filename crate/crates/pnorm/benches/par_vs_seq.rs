//! Parallel vs sequential throughput of the two grid/restart-heavy kernels:
//! the restarted norm estimator and the grid oracle. Built only with the
//! `parallel` feature so both modes are available for comparison.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pnorm::opnorm::{op_norm_estimate_with, op_norm_oracle_with, OracleOptions};
use pnorm::par::Parallelism;
use pnorm::testutil::random_matrix;
use pnorm::{OptimizerConfig, PExponent};

fn modes() -> [(&'static str, Parallelism); 2] {
    [
        ("sequential", Parallelism::Sequential),
        ("parallel", Parallelism::Parallel),
    ]
}

fn bench_estimator(c: &mut Criterion) {
    let cfg = OptimizerConfig::default().with_seed(42).with_restarts(128);
    let mut rng = cfg.rng_for(0);
    let a = random_matrix(&mut rng, 8, 8, 1.0);
    let p = PExponent::new(1.5).unwrap();

    let mut group = c.benchmark_group("estimator_128_restarts_8x8");
    for (label, mode) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(label), &mode, |b, &mode| {
            b.iter(|| op_norm_estimate_with(&a, p, p, &cfg, mode).value)
        });
    }
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let cfg = OptimizerConfig::default().with_seed(43);
    let mut rng = cfg.rng_for(0);
    let a = random_matrix(&mut rng, 3, 3, 1.0);
    let p = PExponent::new(1.5).unwrap();
    let resolution = 24;

    let mut group = c.benchmark_group("oracle_resolution_24_3x3");
    group.sample_size(10);
    for (label, mode) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(label), &mode, |b, &mode| {
            b.iter(|| {
                let opts = OracleOptions { mode, ..OracleOptions::default() };
                op_norm_oracle_with(&a, p, p, resolution, opts).unwrap().value
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_estimator, bench_oracle);
criterion_main!(benches);
