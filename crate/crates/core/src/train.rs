//! Losses, parameter-shift gradients, Adam, staged schedules and Fourier
//! initialization.
//!
//! The data loss is a grid MSE against target densities rescaled so their
//! integer-grid sum is one (matching the model's normalization). The
//! differential loss is the mean squared stationary Fokker-Planck residual
//!
//! ```text
//! nu p + nu (x - mu) dp/dx + (sigma^2 / 2) d^2p/dx^2
//! ```
//!
//! evaluated with the model's analytic derivatives. Parameter gradients use
//! the shift rule on every model-level quantity (values and residuals are
//! trigonometric in each angle), combined through the chain rule, so they
//! match finite differences of the composite losses exactly.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::lu_solve;
use crate::map::{extract_spectrum, FrequencySpectrum, PhaseMapSpec};
use crate::model::{transfer_params, AnsatzKind, AnsatzSpec, DqgmModel, ModelAnsatz, ModelEvaluator};
use crate::parallel;
use crate::rng;
use crate::sim::{prepare_real_state, Angle, Circuit, GateKind};
use crate::stochastics::gaussian_pdf;

/// Evaluation grid with optional target values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingGrid {
    pub points: Vec<f64>,
    pub target: Option<Vec<f64>>,
}

impl TrainingGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSpec("grid points must be strictly increasing".into()));
        }
        Ok(TrainingGrid {
            points,
            target: None,
        })
    }

    /// Attach targets by evaluating a closure at the grid points.
    pub fn with_target_fn(mut self, f: impl Fn(f64) -> f64) -> Self {
        self.target = Some(self.points.iter().map(|&x| f(x)).collect());
        self
    }

    pub fn with_target(mut self, target: Vec<f64>) -> Result<Self> {
        if target.len() != self.points.len() {
            return Err(Error::DimensionMismatch {
                expected: self.points.len(),
                got: target.len(),
            });
        }
        self.target = Some(target);
        Ok(self)
    }

    /// All integer points of the register domain `0..2^N`.
    pub fn integers(n_qubits: usize) -> Self {
        TrainingGrid {
            points: (0..1u64 << n_qubits).map(|l| l as f64).collect(),
            target: None,
        }
    }

    /// `n_points` equispaced points over `[lo, hi]` inclusive.
    pub fn uniform(n_points: usize, lo: f64, hi: f64) -> Result<Self> {
        if n_points < 1 {
            return Err(Error::EmptyGrid);
        }
        if n_points == 1 {
            return TrainingGrid::new(vec![lo]);
        }
        TrainingGrid::new(
            (0..n_points)
                .map(|i| lo + (hi - lo) * i as f64 / (n_points - 1) as f64)
                .collect(),
        )
    }

    /// Out-of-sample quality grid: twenty times more points than the
    /// integer grid, over the same span.
    pub fn generalized(n_qubits: usize) -> Self {
        let n = 20 * (1usize << n_qubits);
        let hi = (1u64 << n_qubits) as f64 - 1.0;
        TrainingGrid::uniform(n, 0.0, hi).expect("nonempty grid")
    }

    pub fn targets(&self) -> Result<&[f64]> {
        self.target.as_deref().ok_or(Error::MissingTargets)
    }
}

/// Gaussian density rescaled so its integer-grid sum over `0..2^N` is one,
/// matching the model's normalization over bit outcomes.
pub fn rescaled_gaussian_target(n_qubits: usize, mu: f64, sigma: f64) -> impl Fn(f64) -> f64 + Clone {
    let sum: f64 = (0..1u64 << n_qubits)
        .map(|l| gaussian_pdf(l as f64, mu, sigma))
        .sum();
    move |x: f64| gaussian_pdf(x, mu, sigma) / sum
}

/// Stationary Fokker-Planck coefficients for the OU drift `-nu (x - mu)`
/// and constant diffusion `g^2 = sigma2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FpeParams {
    pub mu: f64,
    /// Squared diffusion `g^2`.
    pub sigma2: f64,
    pub nu: f64,
}

/// Grid, optional differential constraint and its weight.
#[derive(Clone, Debug)]
pub struct LossBundle {
    pub data_grid: TrainingGrid,
    pub fpe: Option<FpeParams>,
    pub eta: f64,
}

impl LossBundle {
    pub fn new(data_grid: TrainingGrid) -> Self {
        LossBundle {
            data_grid,
            fpe: None,
            eta: 1.0,
        }
    }

    pub fn with_fpe(mut self, fpe: FpeParams, eta: f64) -> Self {
        self.fpe = Some(fpe);
        self.eta = eta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.eta < 0.0 {
            return Err(Error::InvalidSpec("eta must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Which loss drives the optimizer; all three are always tracked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossSelect {
    Data,
    Diff,
    Full,
}

/// Tracked losses: `full = data + eta * diff`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossParts {
    pub data: f64,
    pub diff: f64,
    pub full: f64,
}

fn mse(values: &[f64], targets: &[f64]) -> f64 {
    let n = values.len() as f64;
    values
        .iter()
        .zip(targets)
        .map(|(v, t)| (v - t) * (v - t))
        .sum::<f64>()
        / n
}

/// Stationary FPE residual from precomputed value and derivatives.
pub fn fpe_residual_parts(p: f64, dp: f64, d2p: f64, x: f64, params: &FpeParams) -> f64 {
    params.nu * p + params.nu * (x - params.mu) * dp + 0.5 * params.sigma2 * d2p
}

/// Mean squared error between model values and grid targets.
pub fn data_loss(model: &DqgmModel, grid: &TrainingGrid) -> Result<f64> {
    let targets = grid.targets()?;
    let ev = model.evaluator()?;
    Ok(mse(&ev.values(&grid.points), targets))
}

/// Stationary FPE residual of the model at `x`.
pub fn fpe_residual(model: &DqgmModel, x: f64, params: &FpeParams) -> Result<f64> {
    let ev = model.evaluator()?;
    Ok(evaluator_residual(&ev, x, params))
}

fn evaluator_residual(ev: &ModelEvaluator, x: f64, params: &FpeParams) -> f64 {
    fpe_residual_parts(ev.value(x), ev.derivative(x, 1), ev.derivative(x, 2), x, params)
}

/// Mean squared FPE residual over the grid.
pub fn diff_loss(model: &DqgmModel, grid: &TrainingGrid, params: &FpeParams) -> Result<f64> {
    let ev = model.evaluator()?;
    let n = grid.points.len() as f64;
    let residuals = crate::parallel::map_indexed(grid.points.len(), |i| {
        evaluator_residual(&ev, grid.points[i], params).powi(2)
    });
    Ok(residuals.iter().sum::<f64>() / n)
}

/// All tracked losses at the bound parameters.
pub fn loss_parts(model: &DqgmModel, bundle: &LossBundle) -> Result<LossParts> {
    bundle.validate()?;
    let data = data_loss(model, &bundle.data_grid)?;
    let diff = match &bundle.fpe {
        Some(p) => diff_loss(model, &bundle.data_grid, p)?,
        None => 0.0,
    };
    Ok(LossParts {
        data,
        diff,
        full: data + bundle.eta * diff,
    })
}

fn shift_rule_applicable(model: &DqgmModel) -> Result<()> {
    if let ModelAnsatz::Variational(c) = &model.ansatz {
        for op in c.ops() {
            if matches!(op.angle, Some(Angle::Param(_)))
                && !matches!(op.kind, GateKind::RX | GateKind::RY | GateKind::RZ)
            {
                return Err(Error::InvalidSpec(format!(
                    "parameter-shift gradient requires single-qubit rotation parameters, found {}",
                    op.kind.name()
                )));
            }
        }
    }
    Ok(())
}

/// Gradient of the model value at `x` with respect to every parameter,
/// by the two-point shift rule.
pub fn model_value_gradient(model: &DqgmModel, x: f64) -> Result<Vec<f64>> {
    shift_rule_applicable(model)?;
    let k = model.n_params();
    let shift = std::f64::consts::FRAC_PI_2;
    let grads: Vec<Result<f64>> = parallel::map_indexed(k, |i| {
        let mut plus = model.theta.clone();
        let mut minus = model.theta.clone();
        plus[i] += shift;
        minus[i] -= shift;
        let p = model.evaluator_at(&plus)?.value(x);
        let m = model.evaluator_at(&minus)?.value(x);
        Ok((p - m) / 2.0)
    });
    grads.into_iter().collect()
}

/// Gradient of the selected loss with respect to every parameter.
///
/// Model values and residuals obey the shift rule; squared losses need the
/// chain rule on top, so each component combines base and shifted grid
/// evaluations: `dL/dθ = (2/n) Σ_i (v_i - t_i) (v_i^+ - v_i^-) / 2`.
pub fn theta_gradient(
    model: &DqgmModel,
    bundle: &LossBundle,
    select: LossSelect,
) -> Result<Vec<f64>> {
    bundle.validate()?;
    shift_rule_applicable(model)?;
    let grid = &bundle.data_grid;
    let use_data = matches!(select, LossSelect::Data | LossSelect::Full);
    let use_diff = matches!(select, LossSelect::Diff | LossSelect::Full) && bundle.fpe.is_some();
    let diff_weight = match select {
        LossSelect::Diff => 1.0,
        _ => bundle.eta,
    };

    let targets = if use_data { Some(grid.targets()?.to_vec()) } else { None };
    let base = model.evaluator()?;
    let base_values = base.values(&grid.points);
    let base_resid: Option<Vec<f64>> = bundle.fpe.as_ref().filter(|_| use_diff).map(|p| {
        grid.points
            .iter()
            .map(|&x| evaluator_residual(&base, x, p))
            .collect()
    });

    let n = grid.points.len() as f64;
    let shift = std::f64::consts::FRAC_PI_2;
    let grads: Vec<Result<f64>> = parallel::map_indexed(model.n_params(), |i| {
        let mut plus = model.theta.clone();
        let mut minus = model.theta.clone();
        plus[i] += shift;
        minus[i] -= shift;
        let ev_p = model.evaluator_at(&plus)?;
        let ev_m = model.evaluator_at(&minus)?;
        let mut g = 0.0;
        if let Some(targets) = &targets {
            for (j, &x) in grid.points.iter().enumerate() {
                let dv = (ev_p.value(x) - ev_m.value(x)) / 2.0;
                g += 2.0 / n * (base_values[j] - targets[j]) * dv;
            }
        }
        if let (Some(resid), Some(p)) = (&base_resid, &bundle.fpe) {
            for (j, &x) in grid.points.iter().enumerate() {
                let dr = (evaluator_residual(&ev_p, x, p) - evaluator_residual(&ev_m, x, p)) / 2.0;
                g += diff_weight * 2.0 / n * resid[j] * dr;
            }
        }
        Ok(g)
    });
    grads.into_iter().collect()
}

/// Adam state with bias-corrected moments.
#[derive(Clone, Debug)]
pub struct OptimizerState {
    pub step: usize,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    first: Vec<f64>,
    second: Vec<f64>,
}

impl OptimizerState {
    pub fn new(n_params: usize, lr: f64) -> Self {
        OptimizerState {
            step: 0,
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            first: vec![0.0; n_params],
            second: vec![0.0; n_params],
        }
    }
}

/// One bias-corrected Adam update of `theta` in place.
pub fn adam_step(state: &mut OptimizerState, theta: &mut [f64], grad: &[f64]) -> Result<()> {
    if theta.len() != state.first.len() || grad.len() != state.first.len() {
        return Err(Error::DimensionMismatch {
            expected: state.first.len(),
            got: grad.len(),
        });
    }
    state.step += 1;
    let b1 = state.beta1;
    let b2 = state.beta2;
    let bc1 = 1.0 - b1.powi(state.step as i32);
    let bc2 = 1.0 - b2.powi(state.step as i32);
    for i in 0..theta.len() {
        state.first[i] = b1 * state.first[i] + (1.0 - b1) * grad[i];
        state.second[i] = b2 * state.second[i] + (1.0 - b2) * grad[i] * grad[i];
        let m_hat = state.first[i] / bc1;
        let v_hat = state.second[i] / bc2;
        theta[i] -= state.lr * m_hat / (v_hat.sqrt() + state.eps);
    }
    Ok(())
}

/// One optimization stage of a qubit-wise schedule.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Stage {
    pub width: usize,
    pub depth: usize,
    pub epochs: usize,
    pub lr: f64,
    pub loss: LossSelect,
    /// Grid override for this stage; the bundle grid otherwise.
    #[serde(default)]
    pub grid: Option<TrainingGrid>,
}

/// Staged training plan with optional angle carry-over between stages.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Schedule {
    pub stages: Vec<Stage>,
    pub carry_over: bool,
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        if self.stages.is_empty() {
            return Err(Error::InvalidSpec("schedule needs at least one stage".into()));
        }
        if self.stages.windows(2).any(|w| w[1].width < w[0].width) {
            return Err(Error::InvalidSpec(
                "stage widths must be non-decreasing".into(),
            ));
        }
        Ok(())
    }
}

/// Loss trace entry; losses are recorded before the first update and after
/// every subsequent one.
#[derive(Clone, Copy, Debug)]
pub struct EpochRecord {
    pub epoch: usize,
    pub stage: usize,
    pub data: f64,
    pub diff: f64,
    pub full: f64,
}

/// Trained model plus the per-epoch loss history.
#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub model: DqgmModel,
    pub history: Vec<EpochRecord>,
}

/// Run a staged schedule: per-stage ansatz width/depth, angle carry-over
/// into widened ansätze, Adam on the stage-selected loss, and a history
/// tracking all three losses.
pub fn run_schedule(
    map: &PhaseMapSpec,
    kind: AnsatzKind,
    schedule: &Schedule,
    bundle: &LossBundle,
    seed: u64,
) -> Result<TrainOutcome> {
    schedule.validate()?;
    bundle.validate()?;
    let seed = rng::resolve_seed(seed);
    let mut gen = rng::root(seed);
    let mut draw = |n: usize| -> Vec<f64> {
        (0..n).map(|_| (gen.random::<f64>() * 2.0 - 1.0) * 0.1).collect()
    };

    let mut prev: Option<(AnsatzSpec, Vec<f64>)> = None;
    let mut history = Vec::new();
    let mut epoch = 0usize;
    for (stage_idx, stage) in schedule.stages.iter().enumerate() {
        let spec = AnsatzSpec::new(kind, map.n_qubits, stage.depth, stage.width);
        spec.validate()?;
        let fresh = draw(spec.n_params());
        let theta = match (&prev, schedule.carry_over) {
            (Some((old_spec, old_theta)), true) => {
                transfer_params(old_spec, old_theta, &spec, fresh)?
            }
            _ => fresh,
        };
        let mut model = DqgmModel::new(map.clone(), &spec)?.with_theta(theta)?;
        let stage_bundle = LossBundle {
            data_grid: stage.grid.clone().unwrap_or_else(|| bundle.data_grid.clone()),
            fpe: bundle.fpe,
            eta: bundle.eta,
        };
        let mut opt = OptimizerState::new(model.n_params(), stage.lr);
        let parts = loss_parts(&model, &stage_bundle)?;
        history.push(EpochRecord {
            epoch,
            stage: stage_idx,
            data: parts.data,
            diff: parts.diff,
            full: parts.full,
        });
        for _ in 0..stage.epochs {
            let grad = theta_gradient(&model, &stage_bundle, stage.loss)?;
            let mut theta = model.theta.clone();
            adam_step(&mut opt, &mut theta, &grad)?;
            model.theta = theta;
            epoch += 1;
            let parts = loss_parts(&model, &stage_bundle)?;
            history.push(EpochRecord {
                epoch,
                stage: stage_idx,
                data: parts.data,
                diff: parts.diff,
                full: parts.full,
            });
        }
        prev = Some((spec, model.theta.clone()));
    }
    let (spec, theta) = prev.expect("at least one stage");
    let model = DqgmModel::new(map.clone(), &spec)?.with_theta(theta)?;
    Ok(TrainOutcome { model, history })
}

/// Single-stage convenience wrapper.
#[allow(clippy::too_many_arguments)]
pub fn train(
    map: &PhaseMapSpec,
    kind: AnsatzKind,
    depth: usize,
    width: usize,
    bundle: &LossBundle,
    epochs: usize,
    lr: f64,
    seed: u64,
) -> Result<TrainOutcome> {
    let schedule = Schedule {
        stages: vec![Stage {
            width,
            depth,
            epochs,
            lr,
            loss: if bundle.fpe.is_some() {
                LossSelect::Full
            } else {
                LossSelect::Data
            },
            grid: None,
        }],
        carry_over: false,
    };
    run_schedule(map, kind, &schedule, bundle, seed)
}

/// Fourier initialization result: a real amplitude vector whose induced
/// model matches the truncated cosine series of the target, the
/// state-preparation circuit for it, and the series itself.
#[derive(Clone, Debug)]
pub struct FourierInit {
    pub amplitudes: Vec<f64>,
    pub circuit: Circuit,
    pub series: FrequencySpectrum,
}

impl FourierInit {
    /// Model whose frequency amplitudes are the prepared vector, on a
    /// register of `n_qubits >= L`.
    pub fn into_model(self, n_qubits: usize) -> Result<DqgmModel> {
        DqgmModel::from_state_prep(PhaseMapSpec::new(n_qubits), self.circuit)
    }
}

// Dense DFT; grids here are small enough that O(n^2) is immaterial.
fn dft(input: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let n = input.len();
    let sign = if inverse { 1.0 } else { -1.0 };
    let scale = if inverse { 1.0 / n as f64 } else { 1.0 };
    (0..n)
        .map(|k| {
            let mut acc = Complex64::ZERO;
            for (m, v) in input.iter().enumerate() {
                let angle = sign * 2.0 * std::f64::consts::PI * (k * m % n) as f64 / n as f64;
                acc += v * Complex64::from_polar(1.0, angle);
            }
            scale * acc
        })
        .collect()
}

/// Truncated cosine expansion of `target` over one period `2^L`, factored
/// into a real amplitude vector `a` (length `2^L`) whose induced model
/// reproduces the series; returns the preparation circuit alongside.
///
/// The factorization is cepstral (minimum-phase spectral factor of the
/// nonnegative series) followed by Newton polish on the autocorrelation
/// equations, which lands at machine precision for series bounded away
/// from zero.
pub fn fourier_initialize(target: impl Fn(f64) -> f64, l_qubits: usize) -> Result<FourierInit> {
    if l_qubits == 0 {
        return Err(Error::InvalidSpec("need at least one qubit".into()));
    }
    let dim = 1usize << l_qubits;
    let period = dim as f64;

    // Cosine coefficients by midpoint quadrature over one period.
    let m_quad = 8192usize;
    let mut b = vec![0.0; dim];
    for m in 0..m_quad {
        let x = (m as f64 + 0.5) * period / m_quad as f64;
        let f = target(x);
        b[0] += f;
        for (k, bk) in b.iter_mut().enumerate().skip(1) {
            *bk += 2.0 * f * (2.0 * std::f64::consts::PI * k as f64 * x / period).cos();
        }
    }
    b.iter_mut().for_each(|v| *v /= m_quad as f64);
    if b[0] <= 0.0 {
        return Err(Error::InfeasibleSeries("target has nonpositive mean".into()));
    }

    // Autocorrelation targets: rho_0 = 1 after rescaling the target so the
    // series constant term matches the model's fixed c_0 = 2^-L.
    let mut rho = vec![0.0; dim];
    rho[0] = 1.0;
    for k in 1..dim {
        rho[k] = b[k] / (2.0 * b[0]);
    }

    // Sample the series power T(w) = rho_0 + 2 sum rho_k cos(k w).
    let m_fft = 2048usize;
    let t: Vec<f64> = (0..m_fft)
        .map(|j| {
            let w = 2.0 * std::f64::consts::PI * j as f64 / m_fft as f64;
            rho[0] + 2.0 * (1..dim).map(|k| rho[k] * (k as f64 * w).cos()).sum::<f64>()
        })
        .collect();
    let t_max = t.iter().cloned().fold(0.0, f64::max);
    let t_min = t.iter().cloned().fold(f64::INFINITY, f64::min);
    if t_min < -1e-8 * t_max {
        return Err(Error::InfeasibleSeries(format!(
            "truncated series dips negative (min {t_min:.3e}); no normalized real amplitude vector reproduces it"
        )));
    }
    let floor = 1e-14 * t_max;
    let log_t: Vec<Complex64> = t
        .iter()
        .map(|&v| Complex64::new(v.max(floor).ln(), 0.0))
        .collect();

    // Minimum-phase factor via the real cepstrum.
    let cepstrum = dft(&log_t, true);
    let mut folded = vec![Complex64::ZERO; m_fft];
    folded[0] = cepstrum[0] / 2.0;
    for m in 1..m_fft / 2 {
        folded[m] = cepstrum[m];
    }
    folded[m_fft / 2] = cepstrum[m_fft / 2] / 2.0;
    let half_log = dft(&folded, false);
    let g_spectrum: Vec<Complex64> = half_log.iter().map(|h| h.exp()).collect();
    let g = dft(&g_spectrum, true);
    let mut a: Vec<f64> = g.iter().take(dim).map(|c| c.re).collect();

    // Newton polish on F_k(a) = sum_l a_l a_{l+k} - rho_k.
    let autocorr = |a: &[f64]| -> Vec<f64> {
        (0..dim)
            .map(|k| (0..dim - k).map(|l| a[l] * a[l + k]).sum::<f64>())
            .collect()
    };
    let residual_norm = |a: &[f64]| -> f64 {
        autocorr(a)
            .iter()
            .zip(rho.iter())
            .map(|(r, t)| (r - t).abs())
            .fold(0.0, f64::max)
    };
    let mut best = a.clone();
    let mut best_res = residual_norm(&a);
    for _ in 0..40 {
        if best_res < 1e-13 {
            break;
        }
        let r = autocorr(&a);
        let f: Vec<f64> = r.iter().zip(rho.iter()).map(|(r, t)| -(r - t)).collect();
        let mut jac = vec![vec![0.0; dim]; dim];
        for k in 0..dim {
            for j in 0..dim {
                let mut entry = 0.0;
                if j + k < dim {
                    entry += a[j + k];
                }
                if j >= k {
                    entry += a[j - k];
                }
                jac[k][j] = entry;
            }
        }
        let Ok(delta) = lu_solve(jac, f) else { break };
        // Backtracking keeps the iteration inside the basin.
        let mut step = 1.0;
        let mut improved = false;
        for _ in 0..20 {
            let trial: Vec<f64> = a.iter().zip(delta.iter()).map(|(v, d)| v + step * d).collect();
            let res = residual_norm(&trial);
            if res < best_res {
                a = trial;
                best_res = res;
                best = a.clone();
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if best_res > 1e-9 {
        return Err(Error::InfeasibleSeries(format!(
            "autocorrelation fit stalled at residual {best_res:.3e}"
        )));
    }
    let mut a = best;
    let norm: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    a.iter_mut().for_each(|v| *v /= norm);

    let circuit = prepare_real_state(&a)?;
    let amps_c: Vec<Complex64> = a.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    // The rescaled target series, for direct comparison with the model.
    let mut series = extract_spectrum(&amps_c, l_qubits)?;
    for (k, c) in series.coefficients.iter_mut() {
        let idx = k.unsigned_abs() as usize;
        *c = Complex64::new(rho[idx] / dim as f64, 0.0);
    }
    Ok(FourierInit {
        amplitudes: a,
        circuit,
        series,
    })
}
