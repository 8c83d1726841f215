//! Throughput of the Monte-Carlo kernels, rayon pool versus the
//! single-threaded fallback path.
//!
//! Run with `cargo bench -p fibercap`. Both paths produce bit-identical
//! reports; the comparison here is purely about wall time.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use fibercap::dark::DarkCountParams;
use fibercap::mc::{estimate_choi, estimate_choi_seq};
use fibercap::sweep::{run_sweep, SweepConfig};
use fibercap::{ErasurePauliChannel, PauliDistribution};

fn bench_estimate_choi(c: &mut Criterion) {
    let ch = ErasurePauliChannel::new(
        0.5,
        PauliDistribution::new([0.85, 0.05, 0.05, 0.05]).unwrap(),
    )
    .unwrap();
    let dc = DarkCountParams::new(1e-3).unwrap();

    let mut group = c.benchmark_group("estimate_choi");
    for &n in &[100_000u64, 1_000_000] {
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, &n| {
            b.iter(|| estimate_choi(&ch, dc, n, 42).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, &n| {
            b.iter(|| estimate_choi_seq(&ch, dc, n, 42).unwrap())
        });
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let mut config = SweepConfig::standard();
    config.p_dc_values = vec![0.0, 1e-3, 1e-2];
    config.n_points = 400;
    config.clock_hz = Some(1e9);

    c.bench_function("run_sweep_3x400", |b| {
        b.iter(|| run_sweep(&config).unwrap())
    });
}

criterion_group!(benches, bench_estimate_choi, bench_sweep);
criterion_main!(benches);
