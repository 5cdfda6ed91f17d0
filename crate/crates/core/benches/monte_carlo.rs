use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use prelog_core::checks::noise_mixture_moments;
use prelog_core::duality::{estimate_duality_bound, OutputDensityParams};
use prelog_core::{CorrelationRoot, Execution, InputKind, RngStream};

fn duality_estimate(c: &mut Criterion) {
    let mut group = c.benchmark_group("duality_estimate");
    group.sample_size(10);
    let params = OutputDensityParams::new(2, 4, 1e4).unwrap();
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), 20_000), &exec, |b, &exec| {
            b.iter(|| estimate_duality_bound(InputKind::Sphere, &params, 20_000, RngStream::new(1, 0), exec).unwrap())
        });
    }
    group.finish();
}

fn noise_moments(c: &mut Criterion) {
    let mut group = c.benchmark_group("noise_moments");
    group.sample_size(10);
    let root = CorrelationRoot::from_angles(&[0.0, 0.4, 0.8, 1.2]).unwrap();
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), 50_000), &exec, |b, &exec| {
            b.iter(|| noise_mixture_moments(&root, 2, 50_000, RngStream::new(2, 0), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, duality_estimate, noise_moments);
criterion_main!(benches);
