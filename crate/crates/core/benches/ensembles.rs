//! Ensemble throughput: rayon data-parallel path vs the sequential fallback.
//!
//! With the default `parallel` feature the same workload is timed under
//! thread budgets 1 and the default pool; built with
//! `--no-default-features` every group times the sequential code path.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use hop_core::diffusion::{coupling_ensemble, radial_ensemble, StepperConfig};
use hop_core::jumps::{full_ensemble, Method};
use hop_core::ops::Model;
use hop_core::oracle::{Rank1Oracle, Rank1Params};
use hop_core::parallel::with_thread_budget;
use hop_core::rootsys::{Family, MultiplicityFunction, Normalization, RootSystem};

fn model(family: Family, rank: usize) -> Model {
    let sys = RootSystem::build(family, rank, Normalization::Standard).unwrap();
    let k = MultiplicityFunction::uniform(&sys, 1.0).unwrap();
    Model::new(sys, k).unwrap()
}

fn budgets() -> Vec<(usize, &'static str)> {
    if cfg!(feature = "parallel") {
        vec![(1, "sequential"), (0, "parallel")]
    } else {
        vec![(0, "sequential-fallback")]
    }
}

fn bench_radial(c: &mut Criterion) {
    let m = model(Family::B, 2);
    let cfg = StepperConfig { t_horizon: 4.0, seed: 1, ..Default::default() };
    let mut group = c.benchmark_group("radial_ensemble_b2");
    group.sample_size(10);
    for (budget, label) in budgets() {
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| {
                with_thread_budget(budget, || {
                    black_box(radial_ensemble(&m, &[1.5, 0.7], &cfg, 96, 0).unwrap())
                })
            })
        });
    }
    group.finish();
}

fn bench_full_thinning(c: &mut Criterion) {
    let m = model(Family::Rank1, 1);
    let cfg = StepperConfig { t_horizon: 8.0, seed: 2, ..Default::default() };
    let mut group = c.benchmark_group("full_ensemble_rank1_thinning");
    group.sample_size(10);
    for (budget, label) in budgets() {
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| {
                with_thread_budget(budget, || {
                    black_box(
                        full_ensemble(&m, &[1.0], &cfg, Method::Thinning, None, 128, 0).unwrap(),
                    )
                })
            })
        });
    }
    group.finish();
}

fn bench_coupling(c: &mut Criterion) {
    let m = model(Family::B, 2);
    let cfg = StepperConfig { t_horizon: 30.0, seed: 3, ..Default::default() };
    let mut group = c.benchmark_group("coupling_ensemble_b2");
    group.sample_size(10);
    for (budget, label) in budgets() {
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| {
                with_thread_budget(budget, || {
                    black_box(
                        coupling_ensemble(&m, &[2.0, 1.0], &[3.0, 1.5], &cfg, 64, 0).unwrap(),
                    )
                })
            })
        });
    }
    group.finish();
}

fn bench_oracle_batch(c: &mut Criterion) {
    let params = Rank1Params::new(2.0, 1.0).unwrap();
    let oracle = Rank1Oracle::new(params, 0.7).unwrap();
    let xs: Vec<f64> = (0..512).map(|i| -8.0 + i as f64 * (16.0 / 511.0)).collect();
    c.bench_function("oracle_eval_batch_512", |b| {
        b.iter(|| black_box(oracle.eval_batch(black_box(&xs)).unwrap()))
    });
}

criterion_group!(benches, bench_radial, bench_full_thinning, bench_coupling, bench_oracle_batch);
criterion_main!(benches);
