use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mmes_core::cumulants::{f2_bitsum, f3_0_reduced, f3_1_reduced};
use mmes_core::mmes::MetropolisChain;
use mmes_core::{enumerate_balanced, purity, sample_haar, PotentialEvaluator, RngSeed, SystemSize};

fn size(n: u32) -> SystemSize {
    SystemSize::new(n).unwrap()
}

fn bench_purity(c: &mut Criterion) {
    let mut group = c.benchmark_group("purity");
    for n in [6, 10, 14] {
        let s = size(n);
        let psi = sample_haar(s, RngSeed(1)).unwrap();
        let part = enumerate_balanced(s).unwrap()[0];
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| purity(black_box(&psi), &part).unwrap())
        });
    }
    group.finish();
}

fn bench_potential(c: &mut Criterion) {
    let mut group = c.benchmark_group("potential");
    for n in [4, 6, 8] {
        let s = size(n);
        let psi = sample_haar(s, RngSeed(2)).unwrap();
        let mut eval = PotentialEvaluator::new(s).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| eval.energy_mut(black_box(psi.amplitudes())))
        });
    }
    group.finish();
}

fn bench_structure(c: &mut Criterion) {
    let mut group = c.benchmark_group("structure");
    group.sample_size(10);
    for n in [6, 8] {
        group.bench_with_input(BenchmarkId::new("f2_bitsum", n), &n, |b, &n| {
            b.iter(|| f2_bitsum(black_box(size(n))).unwrap())
        });
    }
    for n in [10, 20, 40] {
        group.bench_with_input(BenchmarkId::new("f3_reduced", n), &n, |b, &n| {
            b.iter(|| (f3_0_reduced(black_box(size(n))), f3_1_reduced(black_box(size(n)))))
        });
    }
    group.finish();
}

fn bench_metropolis(c: &mut Criterion) {
    let mut group = c.benchmark_group("metropolis_step");
    for n in [4, 6, 8] {
        let s = size(n);
        let mut chain = MetropolisChain::new(sample_haar(s, RngSeed(3)).unwrap()).unwrap();
        let mut rng = RngSeed(4).rng();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| chain.step(black_box(10.0), 0.1, &mut rng))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_purity, bench_potential, bench_structure, bench_metropolis);
criterion_main!(benches);
