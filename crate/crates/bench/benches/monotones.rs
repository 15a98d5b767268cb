use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use purity_core::figures::coherence_instance;
use purity_core::linalg::eigh;
use purity_core::monotones::{beta_eps, robustness_generalized};
use purity_core::random::{random_state, stream};
use purity_core::verifier::{run_campaign, CampaignConfig, Theory};
use purity_core::{stabilizer_polytope, QuantumState};

fn eigen(c: &mut Criterion) {
    let mut g = c.benchmark_group("eigh");
    let mut rng = stream(1, 0);
    for d in [2, 4, 8, 16] {
        let rho = random_state(&mut rng, d, d);
        g.bench_with_input(BenchmarkId::from_parameter(d), &rho, |b, rho| b.iter(|| eigh(black_box(rho.matrix()))));
    }
    g.finish();
}

fn hypothesis(c: &mut Criterion) {
    let mut g = c.benchmark_group("beta_eps");
    let mut rng = stream(2, 0);
    for d in [2, 4, 8] {
        let rho = random_state(&mut rng, d, d);
        let sigma = random_state(&mut rng, d, d);
        g.bench_with_input(BenchmarkId::from_parameter(d), &(rho, sigma), |b, (r, s)| {
            b.iter(|| beta_eps(black_box(r), black_box(s), 0.1).unwrap())
        });
    }
    g.finish();
}

fn robustness(c: &mut Criterion) {
    let mut g = c.benchmark_group("robustness_generalized");
    g.sample_size(10);
    for n in [1, 2] {
        let free = stabilizer_polytope(n).unwrap();
        let rho = QuantumState::t_state().depolarized(0.1).tensor_power(n);
        g.bench_with_input(BenchmarkId::new("stabilizer", n), &(rho, free), |b, (r, f)| {
            b.iter(|| robustness_generalized(black_box(r), f, 1e-7).unwrap())
        });
    }
    g.finish();
}

fn polytopes(c: &mut Criterion) {
    let mut g = c.benchmark_group("stabilizer_polytope");
    g.sample_size(10);
    for n in [1, 2, 3] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| stabilizer_polytope(n).unwrap()));
    }
    g.finish();
}

fn campaign(c: &mut Criterion) {
    let (rho, psi) = coherence_instance();
    let cfg = CampaignConfig::new(Theory::coherence(2).unwrap(), rho, psi, 1000, 7);
    let mut g = c.benchmark_group("campaign");
    g.sample_size(10);
    g.bench_function("coherence_1000", |b| b.iter(|| run_campaign(black_box(&cfg)).unwrap()));
    g.finish();
}

criterion_group!(benches, eigen, hypothesis, robustness, polytopes, campaign);
criterion_main!(benches);
