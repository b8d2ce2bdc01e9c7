//! Implicit time evolution of trained parameters.
//!
//! The model's time derivative is expanded through a chain rule on the
//! parameter trajectory: at each step the Fokker-Planck right-hand side `F`
//! is evaluated on the grid, the model Jacobian `J[i][k] = dp(x_i)/dtheta_k`
//! is formed by parameter shift, and the update direction solves the
//! regularized normal equations `(J^T J + lambda I) gamma = J^T F`.
//! Parameters march with a forward Euler step `theta += dt * gamma`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::cholesky_solve;
use crate::model::DqgmModel;
use crate::parallel;
use crate::train::TrainingGrid;

/// Drift and diffusion of the driving SDE, with the analytic derivatives
/// the Fokker-Planck right-hand side needs. Diffusion enters squared.
pub struct DriftDiffusion {
    pub f: Box<dyn Fn(f64) -> f64 + Sync + Send>,
    pub df_dx: Box<dyn Fn(f64) -> f64 + Sync + Send>,
    pub g2: Box<dyn Fn(f64) -> f64 + Sync + Send>,
    pub dg2_dx: Box<dyn Fn(f64) -> f64 + Sync + Send>,
    pub d2g2_dx2: Box<dyn Fn(f64) -> f64 + Sync + Send>,
}

impl DriftDiffusion {
    /// Ornstein-Uhlenbeck: drift `-nu (x - mu)`, constant diffusion `g^2`.
    pub fn ornstein_uhlenbeck(mu: f64, nu: f64, g2: f64) -> Self {
        DriftDiffusion {
            f: Box::new(move |x| -nu * (x - mu)),
            df_dx: Box::new(move |_| -nu),
            g2: Box::new(move |_| g2),
            dg2_dx: Box::new(|_| 0.0),
            d2g2_dx2: Box::new(|_| 0.0),
        }
    }

    /// Pure diffusion: zero drift, constant `g^2`.
    pub fn pure_diffusion(g2: f64) -> Self {
        Self::ornstein_uhlenbeck(0.0, 0.0, g2)
    }

    /// Right-hand side from precomputed model value and derivatives:
    /// `-d/dx [f p] + 1/2 d^2/dx^2 [g^2 p]`, expanded with the product rule.
    pub fn rhs_parts(&self, x: f64, p: f64, dp: f64, d2p: f64) -> f64 {
        let f = (self.f)(x);
        let df = (self.df_dx)(x);
        let g2 = (self.g2)(x);
        let dg2 = (self.dg2_dx)(x);
        let d2g2 = (self.d2g2_dx2)(x);
        -(df * p + f * dp) + 0.5 * (d2g2 * p + 2.0 * dg2 * dp + g2 * d2p)
    }
}

/// Fokker-Planck right-hand side at `x`, using the model's analytic
/// derivatives.
pub fn fpe_rhs(model: &DqgmModel, x: f64, dd: &DriftDiffusion) -> Result<f64> {
    let ev = model.evaluator()?;
    Ok(dd.rhs_parts(x, ev.value(x), ev.derivative(x, 1), ev.derivative(x, 2)))
}

/// Right-hand side on a whole grid.
pub fn fpe_rhs_vector(model: &DqgmModel, grid: &[f64], dd: &DriftDiffusion) -> Result<Vec<f64>> {
    let ev = model.evaluator()?;
    Ok(grid
        .iter()
        .map(|&x| dd.rhs_parts(x, ev.value(x), ev.derivative(x, 1), ev.derivative(x, 2)))
        .collect())
}

/// Model Jacobian `J[i][k] = dp(x_i)/dtheta_k` by parameter shift; each
/// column is validated against finite differences in tests.
pub fn jacobian(model: &DqgmModel, grid: &[f64]) -> Result<Vec<Vec<f64>>> {
    let k = model.n_params();
    let shift = std::f64::consts::FRAC_PI_2;
    let columns: Vec<Result<Vec<f64>>> = parallel::map_indexed(k, |i| {
        let mut plus = model.theta.clone();
        let mut minus = model.theta.clone();
        plus[i] += shift;
        minus[i] -= shift;
        let ev_p = model.evaluator_at(&plus)?;
        let ev_m = model.evaluator_at(&minus)?;
        Ok(grid
            .iter()
            .map(|&x| (ev_p.value(x) - ev_m.value(x)) / 2.0)
            .collect())
    });
    let columns: Vec<Vec<f64>> = columns.into_iter().collect::<Result<_>>()?;
    Ok((0..grid.len())
        .map(|i| columns.iter().map(|col| col[i]).collect())
        .collect())
}

/// Solve `(J^T J + lambda I) gamma = J^T f`. With `lambda = 0` a singular
/// system is reported, not silently regularized.
pub fn solve_normal_equations(j: &[Vec<f64>], f: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let rows = j.len();
    if rows != f.len() {
        return Err(Error::DimensionMismatch {
            expected: rows,
            got: f.len(),
        });
    }
    let cols = j.first().map_or(0, Vec::len);
    if cols == 0 {
        return Ok(Vec::new());
    }
    let mut jtj = vec![vec![0.0; cols]; cols];
    let mut jtf = vec![0.0; cols];
    for (row, &fv) in j.iter().zip(f.iter()) {
        for a in 0..cols {
            jtf[a] += row[a] * fv;
            for b in a..cols {
                jtj[a][b] += row[a] * row[b];
            }
        }
    }
    for a in 0..cols {
        for b in 0..a {
            jtj[a][b] = jtj[b][a];
        }
        jtj[a][a] += lambda;
    }
    cholesky_solve(&jtj, &jtf)
}

/// Euler marching configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub steps: usize,
    /// Evolution grid; defaults to the integer grid of the model register.
    #[serde(default)]
    pub grid: Option<Vec<f64>>,
    /// Tikhonov regularization added to the normal-equation diagonal.
    pub lambda: f64,
    /// Times at which a parameter snapshot is recorded (rounded down to
    /// step multiples, relative to the start of the evolution).
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
}

impl EvolutionConfig {
    pub fn new(dt: f64, steps: usize) -> Self {
        EvolutionConfig {
            dt,
            steps,
            grid: None,
            lambda: 1e-8,
            snapshot_times: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dt <= 0.0 {
            return Err(Error::InvalidSpec("dt must be positive".into()));
        }
        if self.lambda < 0.0 {
            return Err(Error::InvalidSpec("lambda must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Recorded trajectory: snapshot times, parameter vectors and per-step
/// least-squares residual norms.
#[derive(Clone, Debug)]
pub struct EvolutionTrace {
    /// `(requested_time, step_time, theta)` per snapshot; the final state is
    /// always recorded with both times equal to the horizon.
    pub snapshots: Vec<(f64, f64, Vec<f64>)>,
    /// `||J gamma - F||` at every step.
    pub residual_norms: Vec<f64>,
    pub final_theta: Vec<f64>,
}

/// March `theta(t + dt) = theta(t) + dt gamma` with
/// `gamma = (J^T J + lambda I)^{-1} J^T F`, recording snapshots.
pub fn evolve(model: &DqgmModel, config: &EvolutionConfig, dd: &DriftDiffusion) -> Result<EvolutionTrace> {
    config.validate()?;
    let grid: Vec<f64> = match &config.grid {
        Some(g) => g.clone(),
        None => TrainingGrid::integers(model.n_qubits()).points,
    };
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut snap_steps: Vec<(usize, f64)> = config
        .snapshot_times
        .iter()
        .map(|&t| (((t / config.dt).floor() as usize).min(config.steps), t))
        .collect();
    snap_steps.sort_by(|a, b| a.0.cmp(&b.0));

    let mut current = model.clone();
    let mut snapshots = Vec::new();
    let mut residual_norms = Vec::with_capacity(config.steps);
    let mut pending = snap_steps.into_iter().peekable();
    for step in 0..=config.steps {
        while pending.peek().is_some_and(|&(s, _)| s == step) {
            let (s, requested) = pending.next().unwrap();
            snapshots.push((requested, s as f64 * config.dt, current.theta.clone()));
        }
        if step == config.steps {
            break;
        }
        let f = fpe_rhs_vector(&current, &grid, dd)?;
        let j = jacobian(&current, &grid)?;
        let gamma = solve_normal_equations(&j, &f, config.lambda)?;
        let mut residual2 = 0.0;
        for (row, &fv) in j.iter().zip(f.iter()) {
            let jg: f64 = row.iter().zip(gamma.iter()).map(|(a, b)| a * b).sum();
            residual2 += (jg - fv) * (jg - fv);
        }
        if !residual2.is_finite() {
            return Err(Error::Invalid("evolution residual diverged".into()));
        }
        residual_norms.push(residual2.sqrt());
        for (t, g) in current.theta.iter_mut().zip(gamma.iter()) {
            *t += config.dt * g;
        }
    }
    let horizon = config.steps as f64 * config.dt;
    snapshots.push((horizon, horizon, current.theta.clone()));
    Ok(EvolutionTrace {
        snapshots,
        residual_norms,
        final_theta: current.theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::PhaseMapSpec;
    use crate::model::{AnsatzKind, AnsatzSpec};
    use crate::rng;
    use crate::stochastics::gaussian_pdf;
    use crate::train::{
        rescaled_gaussian_target, train, LossBundle as TrainBundle, TrainingGrid,
    };
    use rand::Rng;

    fn random_model(n: usize, depth: usize, width: usize, seed: u64) -> DqgmModel {
        let spec = AnsatzSpec::new(AnsatzKind::HeaXzxCnot, n, depth, width);
        let mut r = rng::root(seed);
        let theta: Vec<f64> = (0..spec.n_params()).map(|_| r.random::<f64>() - 0.5).collect();
        DqgmModel::new(PhaseMapSpec::new(n), &spec)
            .unwrap()
            .with_theta(theta)
            .unwrap()
    }

    #[test]
    fn pure_diffusion_rhs_is_half_second_derivative() {
        // N = 1 identity ansatz in the X form at x = 0: -pi^2 / 4.
        let model = DqgmModel::from_circuit(
            PhaseMapSpec::new(1).with_basis(crate::map::MapBasis::X),
            crate::sim::Circuit::new(1),
        )
        .unwrap();
        let dd = DriftDiffusion::pure_diffusion(1.0);
        let got = fpe_rhs(&model, 0.0, &dd).unwrap();
        let want = -std::f64::consts::PI * std::f64::consts::PI / 4.0;
        assert!((got - want).abs() < 1e-12);
        // f = 0 and g = 0 gives zero.
        let zero = DriftDiffusion::pure_diffusion(0.0);
        assert_eq!(fpe_rhs(&model, 0.3, &zero).unwrap(), 0.0);
    }

    #[test]
    fn ou_rhs_vanishes_on_analytic_steady_state() {
        // Oracle path: analytic Gaussian derivatives in place of the model.
        let (mu, nu, g2) = (3.0, 1.0, 2.0);
        let dd = DriftDiffusion::ornstein_uhlenbeck(mu, nu, g2);
        let var = g2 / (2.0 * nu);
        for x in [1.0, 2.5, 3.0, 4.7] {
            let p = gaussian_pdf(x, mu, var.sqrt());
            let dp = -(x - mu) / var * p;
            let d2p = ((x - mu) * (x - mu) / (var * var) - 1.0 / var) * p;
            assert!(dd.rhs_parts(x, p, dp, d2p).abs() < 1e-6);
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let model = random_model(4, 1, 3, 7);
        let grid: Vec<f64> = (0..16).map(|i| i as f64).collect();
        let j = jacobian(&model, &grid).unwrap();
        let h = 1e-5;
        for k in 0..model.n_params() {
            let mut tp = model.theta.clone();
            let mut tm = model.theta.clone();
            tp[k] += h;
            tm[k] -= h;
            let ev_p = model.evaluator_at(&tp).unwrap();
            let ev_m = model.evaluator_at(&tm).unwrap();
            for (i, &x) in grid.iter().enumerate() {
                let fd = (ev_p.value(x) - ev_m.value(x)) / (2.0 * h);
                assert!((j[i][k] - fd).abs() < 1e-6, "i={i} k={k}");
            }
        }
    }

    #[test]
    fn jacobian_empty_for_parameterless_model() {
        let model = DqgmModel::from_circuit(PhaseMapSpec::new(2), crate::sim::Circuit::new(2)).unwrap();
        let j = jacobian(&model, &[0.0, 1.0]).unwrap();
        assert!(j.iter().all(Vec::is_empty));
    }

    #[test]
    fn normal_equations_satisfy_optimality() {
        // gamma solves the least-squares problem: J^T (J gamma - F) = 0.
        let model = random_model(3, 1, 3, 15);
        let grid: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let j = jacobian(&model, &grid).unwrap();
        let f: Vec<f64> = (0..8).map(|i| (i as f64 * 0.7).sin()).collect();
        let gamma = solve_normal_equations(&j, &f, 1e-10).unwrap();
        let cols = gamma.len();
        for a in 0..cols {
            let mut resid = 0.0;
            for (row, &fv) in j.iter().zip(f.iter()) {
                let jg: f64 = row.iter().zip(gamma.iter()).map(|(x, y)| x * y).sum();
                resid += row[a] * (jg - fv);
            }
            assert!(resid.abs() < 1e-8, "column {a}: {resid}");
        }
    }

    #[test]
    fn square_system_degenerates_to_linear_solve() {
        let j = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let f = vec![1.0, 2.0];
        let gamma = solve_normal_equations(&j, &f, 0.0).unwrap();
        assert!((2.0 * gamma[0] + gamma[1] - 1.0).abs() < 1e-10);
        assert!((gamma[0] + 3.0 * gamma[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn singular_system_reported_without_lambda() {
        let j = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        let f = vec![1.0, 1.0];
        assert!(matches!(
            solve_normal_equations(&j, &f, 0.0),
            Err(Error::SingularSystem)
        ));
        assert!(solve_normal_equations(&j, &f, 1e-8).is_ok());
    }

    #[test]
    fn zero_rhs_keeps_theta_constant() {
        let model = random_model(3, 1, 2, 21);
        let dd = DriftDiffusion::pure_diffusion(0.0);
        let config = EvolutionConfig::new(0.01, 20);
        let trace = evolve(&model, &config, &dd).unwrap();
        for (a, b) in trace.final_theta.iter().zip(model.theta.iter()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(trace.residual_norms.iter().all(|r| *r < 1e-14));
    }

    #[test]
    fn stationary_start_stays_put_for_one_step() {
        // F computed from the analytic stationary solution through the
        // oracle path is numerically zero, so one step leaves theta alone.
        let n = 4;
        let (mu, nu) = (8.0, 1.0);
        let sigma0 = 2.0;
        let g2 = 2.0 * nu * sigma0 * sigma0;
        let dd = DriftDiffusion::ornstein_uhlenbeck(mu, nu, g2);
        let grid: Vec<f64> = (0..16).map(|i| i as f64).collect();
        let f: Vec<f64> = grid
            .iter()
            .map(|&x| {
                let var = sigma0 * sigma0;
                let p = gaussian_pdf(x, mu, sigma0);
                let dp = -(x - mu) / var * p;
                let d2p = ((x - mu) * (x - mu) / (var * var) - 1.0 / var) * p;
                dd.rhs_parts(x, p, dp, d2p)
            })
            .collect();
        let model = random_model(n, 1, 2, 3);
        let j = jacobian(&model, &grid).unwrap();
        let gamma = solve_normal_equations(&j, &f, 1e-8).unwrap();
        let dt = 1e-3;
        let step_norm: f64 = gamma.iter().map(|g| (dt * g).abs()).fold(0.0, f64::max);
        assert!(step_norm < 1e-10, "stationary update moved by {step_norm}");
    }

    #[test]
    fn snapshots_recorded_at_requested_times() {
        let model = random_model(3, 0, 2, 5);
        let dd = DriftDiffusion::pure_diffusion(0.5);
        let mut config = EvolutionConfig::new(0.01, 10);
        config.snapshot_times = vec![0.0, 0.055];
        let trace = evolve(&model, &config, &dd).unwrap();
        assert_eq!(trace.snapshots.len(), 3); // two requested + final
        assert!((trace.snapshots[0].1 - 0.0).abs() < 1e-12);
        assert!((trace.snapshots[1].1 - 0.05).abs() < 1e-12);
        assert!((trace.snapshots[2].1 - 0.1).abs() < 1e-12);
        assert_eq!(trace.residual_norms.len(), 10);
    }

    #[test]
    fn euler_error_halves_with_the_step() {
        // Richardson check on a short diffusion run: the distance between
        // successive step-halvings shrinks about twofold for an O(dt)
        // method.
        let n = 3;
        let target = rescaled_gaussian_target(n, 3.5, 1.0);
        let bundle = TrainBundle::new(TrainingGrid::integers(n).with_target_fn(target));
        let trained = train(
            &PhaseMapSpec::new(n),
            AnsatzKind::RealampRyCz,
            1,
            2,
            &bundle,
            150,
            0.05,
            13,
        )
        .unwrap()
        .model;
        let dd = DriftDiffusion::pure_diffusion(2.0);
        let horizon = 0.04;
        let run = |dt: f64| -> Vec<f64> {
            let config = EvolutionConfig::new(dt, (horizon / dt).round() as usize);
            evolve(&trained, &config, &dd).unwrap().final_theta
        };
        let coarse = run(0.004);
        let mid = run(0.002);
        let fine = run(0.001);
        let dist = |a: &[f64], b: &[f64]| -> f64 {
            a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
        };
        let d1 = dist(&coarse, &mid);
        let d2 = dist(&mid, &fine);
        let ratio = d1 / d2;
        assert!((1.4..=2.8).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn one_parameter_toy_matches_exact_reoptimization() {
        // N = 1 X-form map with a single RY angle: the model is
        // p(x) = 1/2 + (cos(theta)/2) cos(pi x), and pure diffusion decays
        // the coefficient exactly as cos(theta(t)) = cos(theta0)
        // e^{-(g^2/2) pi^2 t}. The evolved angle must track that closed
        // form (the dense-in-time re-optimized angle) with O(dt) error.
        let map = PhaseMapSpec::new(1).with_basis(crate::map::MapBasis::X);
        let mut ansatz = crate::sim::Circuit::new(1);
        let p = ansatz.new_param();
        ansatz
            .push(crate::sim::GateOp::ry(0, crate::sim::Angle::Param(p)))
            .unwrap();
        let theta0 = 1.2;
        let model = DqgmModel::from_circuit(map, ansatz)
            .unwrap()
            .with_theta(vec![theta0])
            .unwrap();
        let ev = model.evaluator().unwrap();
        for x in [0.0, 0.3, 1.4] {
            let want = 0.5 + theta0.cos() / 2.0 * (std::f64::consts::PI * x).cos();
            assert!((ev.value(x) - want).abs() < 1e-12);
        }
        let g2 = 1.0;
        let horizon = 0.2;
        let dd = DriftDiffusion::pure_diffusion(g2);
        let exact = (theta0.cos()
            * (-0.5 * g2 * std::f64::consts::PI.powi(2) * horizon).exp())
        .acos();
        let run = |dt: f64| -> f64 {
            let config = EvolutionConfig::new(dt, (horizon / dt).round() as usize);
            evolve(&model, &config, &dd).unwrap().final_theta[0]
        };
        let e1 = (run(0.004) - exact).abs();
        let e2 = (run(0.002) - exact).abs();
        let e3 = (run(0.001) - exact).abs();
        assert!(e3 < e2 && e2 < e1, "errors not decreasing: {e1} {e2} {e3}");
        let ratio = e1 / e2;
        assert!((1.5..=2.6).contains(&ratio), "Richardson ratio {ratio}");
        assert!(e3 < 2e-3, "absolute error {e3}");
    }

    #[test]
    fn config_validation() {
        assert!(EvolutionConfig::new(0.0, 10).validate().is_err());
        assert!(EvolutionConfig::new(0.01, 10).validate().is_ok());
    }
}
