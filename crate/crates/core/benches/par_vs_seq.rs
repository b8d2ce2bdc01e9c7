//! Parallel vs sequential comparison for the data-parallel kernels.
//!
//! With the default `parallel` feature each group runs the same workload on
//! a single-thread rayon pool and on the default pool; built with
//! `--no-default-features` only the sequential numbers are produced.
//! Results are bitwise identical between the two paths by construction.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use dqgm_core::map::PhaseMapSpec;
use dqgm_core::model::{AnsatzKind, AnsatzSpec, DqgmModel};
use dqgm_core::rng;
use dqgm_core::sim::{sample, GateOp, StateVector};
use dqgm_core::stochastics::{euler_maruyama, OuParams};
use dqgm_core::train::{theta_gradient, LossBundle, LossSelect, TrainingGrid};
use rand::Rng;

fn run_modes(c: &mut Criterion, name: &str, mut work: impl FnMut() + Send) {
    let mut group = c.benchmark_group(name);
    #[cfg(feature = "parallel")]
    {
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        group.bench_function(BenchmarkId::from_parameter("seq"), |b| {
            b.iter(|| single.install(&mut work))
        });
        group.bench_function(BenchmarkId::from_parameter("par"), |b| b.iter(&mut work));
    }
    #[cfg(not(feature = "parallel"))]
    {
        group.bench_function(BenchmarkId::from_parameter("seq"), |b| b.iter(&mut work));
    }
    group.finish();
}

fn model(n: usize, depth: usize, width: usize) -> DqgmModel {
    let spec = AnsatzSpec::new(AnsatzKind::HeaXzxCnot, n, depth, width);
    let mut r = rng::root(1);
    let theta: Vec<f64> = (0..spec.n_params()).map(|_| r.random::<f64>() - 0.5).collect();
    DqgmModel::new(PhaseMapSpec::new(n), &spec)
        .unwrap()
        .with_theta(theta)
        .unwrap()
}

fn bench_gate_layer(c: &mut Criterion) {
    let n = 18;
    let mut state = StateVector::zero_state(n);
    let gates: Vec<_> = (0..n)
        .map(|q| GateOp::h(q).bind(&[], 0.0).unwrap())
        .chain((0..n - 1).map(|q| GateOp::cnot(q, q + 1).bind(&[], 0.0).unwrap()))
        .collect();
    run_modes(c, "gate_layer_18q", move || {
        for g in &gates {
            state.apply_gate(g).unwrap();
        }
        black_box(state.amplitudes()[0]);
    });
}

fn bench_grid_eval(c: &mut Criterion) {
    let m = model(10, 3, 6);
    let grid = TrainingGrid::generalized(10);
    run_modes(c, "grid_eval_10q_20x", move || {
        let ev = m.evaluator().unwrap();
        black_box(ev.values(&grid.points).last().copied());
    });
}

fn bench_loss_gradient(c: &mut Criterion) {
    let m = model(6, 4, 3);
    let target = dqgm_core::train::rescaled_gaussian_target(6, 32.0, 8.0);
    let bundle = LossBundle::new(TrainingGrid::integers(6).with_target_fn(target));
    run_modes(c, "loss_gradient_45_params", move || {
        let g = theta_gradient(&m, &bundle, LossSelect::Data).unwrap();
        black_box(g[0]);
    });
}

fn bench_sampling(c: &mut Criterion) {
    let m = model(10, 2, 6);
    let state = m.build_sampling_circuit().unwrap().run(&m.theta, 0.0).unwrap();
    run_modes(c, "sampling_1m_shots_10q", move || {
        let set = sample(&state, 1_000_000, 7);
        black_box(set.shots());
    });
}

fn bench_euler_maruyama(c: &mut Criterion) {
    let params = OuParams {
        mu: 32.0,
        nu: 1.0,
        sigma2: 64.0,
    };
    run_modes(c, "euler_maruyama_20k_paths", move || {
        let xs = euler_maruyama(&params, 32.0, 0.5, 1e-3, 20_000, 3);
        black_box(xs[0]);
    });
}

criterion_group!(
    benches,
    bench_gate_layer,
    bench_grid_eval,
    bench_loss_gradient,
    bench_sampling,
    bench_euler_maruyama
);
criterion_main!(benches);
