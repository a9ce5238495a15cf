use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use temporal_audit::spectral::{permutation_band_with, welch, WelchConfig};
use temporal_audit::Execution;

fn noise(n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            0.63 + 0.08 * z
        })
        .collect()
}

fn bench_welch(c: &mut Criterion) {
    let mut g = c.benchmark_group("welch");
    for n in [702usize, 4000] {
        let y = noise(n);
        let cfg = WelchConfig::for_length(n, 4);
        g.bench_with_input(BenchmarkId::from_parameter(n), &y, |b, y| b.iter(|| welch(y, 8.0, &cfg).unwrap()));
    }
    g.finish();
}

fn bench_band(c: &mut Criterion) {
    let y = noise(702);
    let cfg = WelchConfig::for_length(702, 4);
    let mut g = c.benchmark_group("permutation_band_1000");
    g.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        g.bench_function(name, |b| {
            b.iter(|| permutation_band_with(&y, 8.0, &cfg, 1000, 0.05, 1, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_welch, bench_band);
criterion_main!(benches);
