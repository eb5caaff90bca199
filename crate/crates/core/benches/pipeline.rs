use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use unimap::experiment::{run_sample, ExperimentConfig, Prepared};
use unimap::par;

fn pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    for (n, g) in [(10_000usize, 10usize), (100_000, 30)] {
        let cfg = ExperimentConfig::new(n, g, 64);
        let prep = Prepared::new(&cfg).unwrap();
        let id = format!("n={n},g={g},64 samples");
        group.bench_with_input(BenchmarkId::new("sequential", &id), &cfg, |b, cfg| {
            b.iter(|| par::map_sequential(0..cfg.samples, |i| run_sample(&prep, cfg, i).unwrap()))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", &id), &cfg, |b, cfg| {
            b.iter(|| par::map_parallel(0..cfg.samples, |i| run_sample(&prep, cfg, i).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
