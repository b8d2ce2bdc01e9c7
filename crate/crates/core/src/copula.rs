//! Two-register copula circuits and bivariate sampling.
//!
//! Correlations between two stochastic variables are injected by a fixed
//! Bell-pair layer linking qubit `i` of register 1 to qubit `i` of register
//! 2; register-local unitaries then shape (or destroy) the correlation
//! while every marginal stays exactly uniform. Measured pairs `(z1, z2)`
//! are mapped to data space through per-variable normal quantiles with
//! midpoint dequantization `u = (z + 1/2) / 2^n`, which avoids the
//! diverging endpoints of the quantile function.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{build_basis_transform, MapBasis, PhaseMapSpec};
use crate::model::AnsatzSpec;
use crate::parallel;
use crate::rng;
use crate::sim::{sample, Angle, Circuit, GateOp, SampleSet, StateVector};
use crate::stochastics::normal_quantile;
use crate::train::{adam_step, OptimizerState};

/// Entangling layer between the registers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entangler {
    /// Pairwise Bell states between qubit `i` of each register.
    BellPairs,
}

/// Register-local operations applied after the entangler.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalOps {
    Identity,
    /// One Hadamard per register qubit (basis decorrelation).
    HadamardLayer,
    /// An RX layer then an RY layer with fixed angles (partial correlation).
    RotationLayers { rx: f64, ry: f64 },
    /// Explicit gates with register-local qubit indices.
    Custom(Vec<GateOp>),
}

/// Two-register copula circuit specification (`N = 2n` qubits total).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CopulaCircuitSpec {
    pub n_per_register: usize,
    pub entangler: Entangler,
    pub register1_locals: LocalOps,
    pub register2_locals: LocalOps,
    /// Optional variational circuit per register (used in training).
    #[serde(default)]
    pub trainable: Option<(AnsatzSpec, AnsatzSpec)>,
}

impl CopulaCircuitSpec {
    pub fn new(n_per_register: usize) -> Self {
        CopulaCircuitSpec {
            n_per_register,
            entangler: Entangler::BellPairs,
            register1_locals: LocalOps::Identity,
            register2_locals: LocalOps::Identity,
            trainable: None,
        }
    }

    pub fn with_locals(mut self, register1: LocalOps, register2: LocalOps) -> Self {
        self.register1_locals = register1;
        self.register2_locals = register2;
        self
    }

    pub fn with_trainable(mut self, reg1: AnsatzSpec, reg2: AnsatzSpec) -> Self {
        self.trainable = Some((reg1, reg2));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_per_register == 0 {
            return Err(Error::InvalidSpec("registers need at least one qubit".into()));
        }
        for (locals, _) in [(&self.register1_locals, 0), (&self.register2_locals, 1)] {
            if let LocalOps::Custom(ops) = locals {
                for op in ops {
                    op.validate(self.n_per_register)?;
                }
            }
        }
        if let Some((a, b)) = &self.trainable {
            for spec in [a, b] {
                if spec.n_qubits != self.n_per_register {
                    return Err(Error::InvalidSpec(
                        "trainable ansatz register width mismatch".into(),
                    ));
                }
                spec.validate()?;
            }
        }
        Ok(())
    }
}

fn push_locals(c: &mut Circuit, locals: &LocalOps, offset: usize, n: usize) -> Result<()> {
    match locals {
        LocalOps::Identity => {}
        LocalOps::HadamardLayer => {
            for q in 0..n {
                c.push(GateOp::h(offset + q))?;
            }
        }
        LocalOps::RotationLayers { rx, ry } => {
            for q in 0..n {
                c.push(GateOp::rx(offset + q, Angle::Fixed(*rx)))?;
            }
            for q in 0..n {
                c.push(GateOp::ry(offset + q, Angle::Fixed(*ry)))?;
            }
        }
        LocalOps::Custom(ops) => {
            for op in ops {
                let shifted = GateOp {
                    kind: op.kind,
                    targets: op.targets.iter().map(|q| q + offset).collect(),
                    controls: op.controls.iter().map(|q| q + offset).collect(),
                    angle: op.angle,
                };
                c.push(shifted)?;
            }
        }
    }
    Ok(())
}

fn push_with_param_offset(c: &mut Circuit, source: &Circuit, qubit_offset: usize, slot_offset: usize) -> Result<()> {
    for op in source.ops() {
        let angle = match op.angle {
            Some(Angle::Param(s)) => Some(Angle::Param(s + slot_offset)),
            other => other,
        };
        c.push(GateOp {
            kind: op.kind,
            targets: op.targets.iter().map(|q| q + qubit_offset).collect(),
            controls: op.controls.iter().map(|q| q + qubit_offset).collect(),
            angle,
        })?;
    }
    Ok(())
}

/// Bell-pair layer followed by register-local operations (and trainable
/// circuits when present). Measuring the result yields `(z1, z2)` directly:
/// register 1 occupies the high bits of the outcome.
pub fn build_copula_sampler(spec: &CopulaCircuitSpec) -> Result<Circuit> {
    spec.validate()?;
    let n = spec.n_per_register;
    let mut c = Circuit::new(2 * n);
    match spec.entangler {
        Entangler::BellPairs => {
            for i in 0..n {
                c.push(GateOp::h(i))?;
                c.push(GateOp::cnot(i, n + i))?;
            }
        }
    }
    push_locals(&mut c, &spec.register1_locals, 0, n)?;
    push_locals(&mut c, &spec.register2_locals, n, n)?;
    if let Some((a, b)) = &spec.trainable {
        let ca = a.build()?;
        let cb = b.build()?;
        let pa = ca.n_params();
        push_with_param_offset(&mut c, &ca, 0, 0)?;
        push_with_param_offset(&mut c, &cb, n, pa)?;
    }
    Ok(c)
}

/// Split a measured `2n`-bit outcome into `(z1, z2)`.
pub fn split_outcome(outcome: u64, n_per_register: usize) -> (u64, u64) {
    (outcome >> n_per_register, outcome & ((1 << n_per_register) - 1))
}

/// Measured pair counts from a sample set over `2n` qubits.
pub fn pair_counts(set: &SampleSet, n_per_register: usize) -> Vec<((u64, u64), u64)> {
    set.counts()
        .iter()
        .map(|(&outcome, &count)| (split_outcome(outcome, n_per_register), count))
        .collect()
}

/// Marginal distribution parameters for one variable.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalSpec {
    pub mu: f64,
    pub sigma: f64,
}

impl MarginalSpec {
    pub fn validate(&self) -> Result<()> {
        if self.sigma <= 0.0 {
            return Err(Error::InvalidSpec("marginal sigma must be positive".into()));
        }
        Ok(())
    }
}

/// Map a latent pair to data space: `u_j = (z_j + 1/2) / 2^n`, then the
/// normal quantile of each marginal.
pub fn latent_to_data(
    z: (u64, u64),
    n_per_register: usize,
    marginals: (&MarginalSpec, &MarginalSpec),
) -> Result<(f64, f64)> {
    let dim = 1u64 << n_per_register;
    if z.0 >= dim || z.1 >= dim {
        return Err(Error::InvalidSpec(format!(
            "latent outcome ({}, {}) outside [0, {dim})",
            z.0, z.1
        )));
    }
    marginals.0.validate()?;
    marginals.1.validate()?;
    let u1 = (z.0 as f64 + 0.5) / dim as f64;
    let u2 = (z.1 as f64 + 0.5) / dim as f64;
    Ok((
        normal_quantile(u1, marginals.0.mu, marginals.0.sigma)?,
        normal_quantile(u2, marginals.1.mu, marginals.1.sigma)?,
    ))
}

/// Sample the copula circuit and map every shot to data space.
pub fn sample_data_pairs(
    spec: &CopulaCircuitSpec,
    theta: &[f64],
    shots: u64,
    seed: u64,
    marginals: (&MarginalSpec, &MarginalSpec),
) -> Result<Vec<(f64, f64)>> {
    let n = spec.n_per_register;
    let state = build_copula_sampler(spec)?.run(theta, 0.0)?;
    let set = sample(&state, shots, seed);
    let mut out = Vec::with_capacity(shots as usize);
    for ((z1, z2), count) in pair_counts(&set, n) {
        let xy = latent_to_data((z1, z2), n, marginals)?;
        for _ in 0..count {
            out.push(xy);
        }
    }
    Ok(out)
}

/// Trainable two-register latent copula model.
///
/// The comparison state is the Bell layer followed by the per-register
/// variational circuits; the model value at `(x1, x2)` is its overlap with
/// the product of per-register latent states. Sampling applies the basis
/// transform on each register, so integer-point model values equal pair
/// probabilities exactly.
#[derive(Clone, Debug)]
pub struct CopulaModel {
    pub map: PhaseMapSpec,
    pub spec: CopulaCircuitSpec,
    pub theta: Vec<f64>,
}

impl CopulaModel {
    pub fn new(spec: CopulaCircuitSpec) -> Result<Self> {
        spec.validate()?;
        if spec.trainable.is_none() {
            return Err(Error::InvalidSpec(
                "copula model requires trainable ansätze".into(),
            ));
        }
        let circuit = build_copula_sampler(&spec)?;
        let n_params = circuit.n_params();
        Ok(CopulaModel {
            map: PhaseMapSpec::new(spec.n_per_register),
            spec,
            theta: vec![0.0; n_params],
        })
    }

    pub fn n_params(&self) -> usize {
        self.theta.len()
    }

    /// Latent comparison state over both registers.
    pub fn comparison_state(&self, theta: &[f64]) -> Result<StateVector> {
        build_copula_sampler(&self.spec)?.run(theta, 0.0)
    }

    /// Model value at a real latent pair.
    pub fn eval(&self, x1: f64, x2: f64) -> Result<f64> {
        self.eval_at(&self.theta, x1, x2)
    }

    pub fn eval_at(&self, theta: &[f64], x1: f64, x2: f64) -> Result<f64> {
        let psi = self.comparison_state(theta)?;
        Ok(eval_pair(&self.map, psi.amplitudes(), x1, x2))
    }

    /// Sampling circuit: comparison-state preparation plus the per-register
    /// basis transform.
    pub fn build_sampling_circuit(&self) -> Result<Circuit> {
        let n = self.spec.n_per_register;
        let mut c = build_copula_sampler(&self.spec)?;
        let transform = build_basis_transform(&self.map)?;
        for offset in [0, n] {
            let embedded = transform.embedded(2 * n, offset)?;
            for op in embedded.ops() {
                c.push(op.clone())?;
            }
        }
        Ok(c)
    }

    /// Exact pair probabilities of the sampling circuit, indexed by the
    /// combined outcome.
    pub fn pair_probabilities(&self) -> Result<Vec<f64>> {
        Ok(self
            .build_sampling_circuit()?
            .run(&self.theta, 0.0)?
            .probabilities())
    }

    pub fn sample(&self, shots: u64, seed: u64) -> Result<SampleSet> {
        let state = self.build_sampling_circuit()?.run(&self.theta, 0.0)?;
        Ok(sample(&state, shots, seed))
    }
}

fn eval_pair(map: &PhaseMapSpec, psi: &[Complex64], x1: f64, x2: f64) -> f64 {
    let a1 = latent_frame(map, x1);
    let a2 = latent_frame(map, x2);
    let dim = a1.len();
    let mut acc = Complex64::ZERO;
    for (l1, v1) in a1.iter().enumerate() {
        let row = l1 * dim;
        for (l2, v2) in a2.iter().enumerate() {
            acc += (v1 * v2).conj() * psi[row + l2];
        }
    }
    acc.norm_sqr()
}

fn latent_frame(map: &PhaseMapSpec, x: f64) -> Vec<Complex64> {
    let mut amps = map.latent_amplitudes(x);
    if map.basis == MapBasis::X {
        crate::map::walsh_hadamard(&mut amps);
    }
    amps
}

/// Copula training configuration: MSE against a latent-density closure on
/// the integer grid.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CopulaTrainConfig {
    pub epochs: usize,
    pub lr: f64,
    pub seed: u64,
}

/// Train the copula model against a target density over the open unit
/// square; the target is discretized at bin midpoints and rescaled to sum
/// to one over the grid. Returns the trained model and per-epoch MSE.
pub fn train_copula(
    model: &CopulaModel,
    target: impl Fn(f64, f64) -> f64,
    config: &CopulaTrainConfig,
) -> Result<(CopulaModel, Vec<f64>)> {
    let n = model.spec.n_per_register;
    let dim = 1usize << n;
    let mut targets = vec![0.0; dim * dim];
    for z1 in 0..dim {
        for z2 in 0..dim {
            let u1 = (z1 as f64 + 0.5) / dim as f64;
            let u2 = (z2 as f64 + 0.5) / dim as f64;
            targets[z1 * dim + z2] = target(u1, u2);
        }
    }
    let total: f64 = targets.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidSpec("copula target must have positive mass".into()));
    }
    targets.iter_mut().for_each(|t| *t /= total);

    let grid_values = |theta: &[f64]| -> Result<Vec<f64>> {
        let psi = model.comparison_state(theta)?;
        let mut values = vec![0.0; dim * dim];
        for z1 in 0..dim {
            for z2 in 0..dim {
                values[z1 * dim + z2] =
                    eval_pair(&model.map, psi.amplitudes(), z1 as f64, z2 as f64);
            }
        }
        Ok(values)
    };
    let mse = |values: &[f64]| -> f64 {
        values
            .iter()
            .zip(targets.iter())
            .map(|(v, t)| (v - t) * (v - t))
            .sum::<f64>()
            / (dim * dim) as f64
    };

    let mut gen = rng::root(rng::resolve_seed(config.seed));
    let mut theta: Vec<f64> = (0..model.n_params())
        .map(|_| (rand::Rng::random::<f64>(&mut gen) * 2.0 - 1.0) * 0.1)
        .collect();
    let mut opt = OptimizerState::new(theta.len(), config.lr);
    let mut history = Vec::with_capacity(config.epochs + 1);
    history.push(mse(&grid_values(&theta)?));
    let shift = std::f64::consts::FRAC_PI_2;
    let points = dim * dim;
    for _ in 0..config.epochs {
        let base = grid_values(&theta)?;
        let grads: Vec<Result<f64>> = parallel::map_indexed(theta.len(), |i| {
            let mut plus = theta.clone();
            let mut minus = theta.clone();
            plus[i] += shift;
            minus[i] -= shift;
            let vp = grid_values(&plus)?;
            let vm = grid_values(&minus)?;
            let mut g = 0.0;
            for j in 0..points {
                g += 2.0 / points as f64 * (base[j] - targets[j]) * (vp[j] - vm[j]) / 2.0;
            }
            Ok(g)
        });
        let grads: Vec<f64> = grads.into_iter().collect::<Result<_>>()?;
        adam_step(&mut opt, &mut theta, &grads)?;
        history.push(mse(&grid_values(&theta)?));
    }
    let trained = CopulaModel {
        map: model.map.clone(),
        spec: model.spec.clone(),
        theta,
    };
    Ok((trained, history))
}

/// Max-norm distance of each register's reduced density matrix from the
/// maximally mixed state; zero means exactly flat marginals.
pub fn marginal_flatness(state: &StateVector, n_per_register: usize) -> f64 {
    let dim = 1usize << n_per_register;
    let amps = state.amplitudes();
    let mut worst: f64 = 0.0;
    for register in 0..2 {
        for i in 0..dim {
            for j in 0..dim {
                let mut rho_ij = Complex64::ZERO;
                for k in 0..dim {
                    let (a, b) = if register == 0 {
                        (i * dim + k, j * dim + k)
                    } else {
                        (k * dim + i, k * dim + j)
                    };
                    rho_ij += amps[a] * amps[b].conj();
                }
                let want = if i == j { 1.0 / dim as f64 } else { 0.0 };
                worst = worst.max((rho_ij - Complex64::new(want, 0.0)).norm());
            }
        }
    }
    worst
}
