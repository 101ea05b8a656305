//! Batch-sampling throughput: the data-parallel driver against the
//! sequential fallback, across batch sizes, plus the two exact methods
//! head to head at a fixed batch size.
//!
//! Run with `cargo bench -p skewsim`. With the `parallel` feature disabled
//! the two drivers are the same code path, so the first group then
//! measures the fan-out overhead alone.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use skewsim::drift::DriftSpec;
use skewsim::sim::{batch_terminal, batch_terminal_sequential, Method, SimConfig};

fn bench_parallel_vs_sequential(c: &mut Criterion) {
    let spec = DriftSpec::builtin_b1();
    let cfg = SimConfig {
        t: 1.0,
        seed: 42,
        ..SimConfig::default()
    };
    let mut group = c.benchmark_group("batch_terminal_srrs");
    group.sample_size(10);
    for n in [64usize, 256] {
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, &n| {
            b.iter(|| batch_terminal(black_box(&spec), 0.5, Method::Srrs, n, &cfg).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, &n| {
            b.iter(|| {
                batch_terminal_sequential(black_box(&spec), 0.5, Method::Srrs, n, &cfg).unwrap()
            })
        });
    }
    group.finish();
}

fn bench_methods(c: &mut Criterion) {
    let spec = DriftSpec::builtin_b1();
    let cfg = SimConfig {
        t: 1.0,
        seed: 42,
        ..SimConfig::default()
    };
    let mut group = c.benchmark_group("method");
    group.sample_size(10);
    for (name, method) in [
        ("rrs", Method::Rrs),
        ("srrs", Method::Srrs),
        ("euler_1e-2", Method::Euler { step: 1e-2 }),
    ] {
        group.bench_function(name, |b| {
            b.iter(|| batch_terminal(black_box(&spec), 0.5, method, 64, &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_parallel_vs_sequential, bench_methods);
criterion_main!(benches);
