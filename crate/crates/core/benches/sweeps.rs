use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use quasirev::experiments::{convergence_rows, ExperimentConfig};
use quasirev::Execution;

fn ladder(c: &mut Criterion) {
    let ecfg = ExperimentConfig::default();
    let cfg = ecfg.scheme(2, 1, 1e-4);
    let meshes = [8, 16, 32];

    let mut group = c.benchmark_group("convergence_ladder_8_32");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| convergence_rows(&ecfg, &cfg, &meshes, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, ladder);
criterion_main!(benches);
