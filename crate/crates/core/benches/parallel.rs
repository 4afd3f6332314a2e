//! Compares the rayon-backed path fan-out against the always-sequential
//! fallback on the two hot kernels: full wealth-path simulation and the
//! stochastic oracle for psi.
//!
//! Run with `cargo bench -p reinvest`. Both arms produce bitwise-identical
//! results; the bench exists to measure the speedup, not to validate.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use reinvest::claims::ClaimSizeModel;
use reinvest::exec::{map_path_chunks, map_path_chunks_seq};
use reinvest::filter::solve_riccati;
use reinvest::investment::PsiEvaluator;
use reinvest::mc::{simulate_path_bundle, Strategy};
use reinvest::params::ModelParams;
use reinvest::premium::PremiumPrinciple;
use reinvest::rng::path_rng;

use rand::prelude::*;
use rand_distr::StandardNormal;

const N_PATHS: usize = 2_048;
const CHUNK: usize = 64;
const N_STEPS: usize = 500;

fn bench_wealth_paths(c: &mut Criterion) {
    let params = ModelParams::default();
    let model = ClaimSizeModel::uniform(2.0).unwrap();
    let pp = PremiumPrinciple::expected_value(0.2, 0.3).unwrap();
    let curve = solve_riccati(&params, N_STEPS);
    let eval = PsiEvaluator::new(&params, &curve);
    let strategy = Strategy::optimal();

    let kernel = |range: std::ops::Range<usize>| -> f64 {
        let mut acc = 0.0;
        for path in range {
            let b = simulate_path_bundle(
                &params, &model, &pp, &strategy, &curve, &eval, 42, path as u64,
            );
            acc += b.wealth.last().unwrap();
        }
        acc
    };

    let mut group = c.benchmark_group("wealth_paths");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| {
            let sums = map_path_chunks(N_PATHS, CHUNK, kernel);
            black_box(sums.iter().sum::<f64>())
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let sums = map_path_chunks_seq(N_PATHS, CHUNK, kernel);
            black_box(sums.iter().sum::<f64>())
        })
    });
    group.finish();
}

fn bench_psi_oracle(c: &mut Criterion) {
    let params = ModelParams::default();
    let curve = solve_riccati(&params, N_STEPS);
    let dt = curve.dt();
    let sqrt_dt = dt.sqrt();
    let b0mu0 = params.b0 * params.mu0;

    // one Euler path of the auxiliary mean process
    let kernel = move |range: std::ops::Range<usize>| -> f64 {
        let mut acc = 0.0;
        for path in range {
            let mut rng = path_rng(7, path as u64);
            let mut pi = 0.4;
            let mut integral = 0.0;
            for k in 0..N_STEPS {
                let z: f64 = rng.sample(StandardNormal);
                let a_k = params.b0 + curve.p()[k];
                let next = pi + (b0mu0 - a_k * pi) * dt + curve.p()[k] * sqrt_dt * z;
                integral += 0.5 * (pi + next) * dt;
                pi = next;
            }
            acc += integral;
        }
        acc
    };

    let mut group = c.benchmark_group("psi_oracle");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| {
            let sums = map_path_chunks(N_PATHS * 4, CHUNK, kernel);
            black_box(sums.iter().sum::<f64>())
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let sums = map_path_chunks_seq(N_PATHS * 4, CHUNK, kernel);
            black_box(sums.iter().sum::<f64>())
        })
    });
    group.finish();
}

criterion_group!(benches, bench_wealth_paths, bench_psi_oracle);
criterion_main!(benches);
