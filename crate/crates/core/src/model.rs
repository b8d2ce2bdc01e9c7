//! Model assembly, evaluation, analytic x-derivatives and sampling.
//!
//! A [`DqgmModel`] pairs a phase feature map with an ansatz and a parameter
//! vector. The model value is the global-zero cost expectation
//! `p(x) = |<0| A(theta) U_phi(x) |0>|^2`, evaluated through the
//! frequency-frame amplitudes `a` of the ansatz state (for the ZH map
//! `a = A^dag|0>`, for the X map a Hadamard layer is absorbed), so that
//!
//! ```text
//! p(x) = | 2^{-N/2} sum_l conj(a_l) exp(-i nu_l x) |^2 .
//! ```
//!
//! Sampling uses the fixed basis transform: the bit-basis state is the QFT
//! image of `a`, which makes model values at integer `x` equal bit-string
//! probabilities exactly — the identity that pins every dagger and ordering
//! convention here, enforced by tests rather than symbol manipulation.
//!
//! Derivatives are read out analytically. With `M = sum_j (pi / 2^j) X_j`
//! the generator of the map, the first- and second-derivative cost
//! operators are
//!
//! ```text
//! d1C = i[M, C0]           = sum_j (pi/2^j) Y_j (x) |0><0|_rest
//! d2C = i[M, i[M, C0]]     = 2 M C0 M - M^2 C0 - C0 M^2
//! ```
//!
//! measured on the reversed state `U_phi(x)^dag A^dag |0>`. The second form
//! carries the `M^2` terms; dropping them fails the finite-difference
//! oracle, which is authoritative throughout.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{build_basis_transform, walsh_hadamard, MapBasis, PhaseMapSpec};
use crate::map::{extract_spectrum, FrequencySpectrum};
use crate::sim::{
    build_qft, sample, Angle, Circuit, GateOp, PauliAxis, ProjectedPauliTerm, SampleSet,
    StateVector,
};

/// Variational circuit families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzKind {
    /// SU(2) layers decomposed as X-Z-X rotations with CNOT bricks.
    HeaXzxCnot,
    /// Real-amplitude form: RY layers with CZ bricks.
    RealampRyCz,
}

/// Layered hardware-efficient ansatz acting on the `width` lowest-frequency
/// qubits (code qubits `N - w .. N`), identity elsewhere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub kind: AnsatzKind,
    pub n_qubits: usize,
    pub depth: usize,
    pub width: usize,
}

impl AnsatzSpec {
    pub fn new(kind: AnsatzKind, n_qubits: usize, depth: usize, width: usize) -> Self {
        AnsatzSpec {
            kind,
            n_qubits,
            depth,
            width,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.width < 1 || self.width > self.n_qubits {
            return Err(Error::InvalidSpec(format!(
                "ansatz width {} outside [1, {}]",
                self.width, self.n_qubits
            )));
        }
        Ok(())
    }

    fn rotations_per_qubit(&self) -> usize {
        match self.kind {
            AnsatzKind::HeaXzxCnot => 3,
            AnsatzKind::RealampRyCz => 1,
        }
    }

    pub fn n_params(&self) -> usize {
        self.rotations_per_qubit() * self.width * (self.depth + 1)
    }

    /// Parameter slot of rotation `rot` on window position `pos` in layer
    /// block `layer`. Blocks are laid out layer-major so angles carry over
    /// between specs that share `(layer, qubit, rot)`.
    pub fn param_index(&self, layer: usize, pos: usize, rot: usize) -> usize {
        (layer * self.width + pos) * self.rotations_per_qubit() + rot
    }

    /// Active code qubits, lowest-frequency window.
    pub fn window(&self) -> std::ops::Range<usize> {
        self.n_qubits - self.width..self.n_qubits
    }

    /// Emit the circuit; parameter slots `0..n_params()`.
    pub fn build(&self) -> Result<Circuit> {
        self.validate()?;
        let mut c = Circuit::new(self.n_qubits);
        let window: Vec<usize> = self.window().collect();
        let rots = self.rotations_per_qubit();
        for layer in 0..=self.depth {
            if layer > 0 && window.len() > 1 {
                // Entangling brick on alternating odd/even pairs.
                let offset = (layer - 1) % 2;
                let mut i = offset;
                while i + 1 < window.len() {
                    let (a, b) = (window[i], window[i + 1]);
                    match self.kind {
                        AnsatzKind::HeaXzxCnot => c.push(GateOp::cnot(a, b))?,
                        AnsatzKind::RealampRyCz => c.push(GateOp::cz(a, b))?,
                    }
                    i += 2;
                }
            }
            for (pos, &q) in window.iter().enumerate() {
                for rot in 0..rots {
                    let slot = Angle::Param(self.param_index(layer, pos, rot));
                    match (self.kind, rot) {
                        (AnsatzKind::HeaXzxCnot, 0 | 2) => c.push(GateOp::rx(q, slot))?,
                        (AnsatzKind::HeaXzxCnot, _) => c.push(GateOp::rz(q, slot))?,
                        (AnsatzKind::RealampRyCz, _) => c.push(GateOp::ry(q, slot))?,
                    }
                }
            }
        }
        Ok(c)
    }
}

/// Copy angles shared between two specs of the same kind (same layer, same
/// absolute qubit, same rotation index); remaining angles keep `fresh`.
pub fn transfer_params(
    old: &AnsatzSpec,
    old_theta: &[f64],
    new: &AnsatzSpec,
    fresh: Vec<f64>,
) -> Result<Vec<f64>> {
    if old.kind != new.kind || old.n_qubits != new.n_qubits {
        return Err(Error::InvalidSpec(
            "carry-over requires matching ansatz kind and register".into(),
        ));
    }
    if old_theta.len() != old.n_params() || fresh.len() != new.n_params() {
        return Err(Error::DimensionMismatch {
            expected: new.n_params(),
            got: fresh.len(),
        });
    }
    let mut theta = fresh;
    let old_window: Vec<usize> = old.window().collect();
    let new_window: Vec<usize> = new.window().collect();
    for layer in 0..=old.depth.min(new.depth) {
        for (old_pos, &q) in old_window.iter().enumerate() {
            if let Some(new_pos) = new_window.iter().position(|&nq| nq == q) {
                for rot in 0..old.rotations_per_qubit() {
                    theta[new.param_index(layer, new_pos, rot)] =
                        old_theta[old.param_index(layer, old_pos, rot)];
                }
            }
        }
    }
    Ok(theta)
}

/// Cost operator choices; the global zero projector is the one exercised.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostKind {
    GlobalZero,
}

/// How the comparison state is produced.
#[derive(Clone, Debug)]
pub enum ModelAnsatz {
    /// Variational circuit applied after the feature map.
    Variational(Circuit),
    /// Explicit preparation of the frequency-frame amplitudes (`a = P|0>`),
    /// used by Fourier initialization.
    Prepared(Circuit),
}

/// Phase-map model with bound parameters.
#[derive(Clone, Debug)]
pub struct DqgmModel {
    pub map: PhaseMapSpec,
    pub ansatz: ModelAnsatz,
    pub theta: Vec<f64>,
    pub cost: CostKind,
}

impl DqgmModel {
    /// Model from an ansatz spec with all angles zero.
    pub fn new(map: PhaseMapSpec, ansatz: &AnsatzSpec) -> Result<Self> {
        map.validate()?;
        if ansatz.n_qubits != map.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: map.n_qubits,
                got: ansatz.n_qubits,
            });
        }
        let circuit = ansatz.build()?;
        let n = circuit.n_params();
        Ok(DqgmModel {
            map,
            ansatz: ModelAnsatz::Variational(circuit),
            theta: vec![0.0; n],
            cost: CostKind::GlobalZero,
        })
    }

    /// Model from an explicit variational circuit.
    pub fn from_circuit(map: PhaseMapSpec, circuit: Circuit) -> Result<Self> {
        map.validate()?;
        if circuit.n_qubits() != map.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: map.n_qubits,
                got: circuit.n_qubits(),
            });
        }
        let n = circuit.n_params();
        Ok(DqgmModel {
            map,
            ansatz: ModelAnsatz::Variational(circuit),
            theta: vec![0.0; n],
            cost: CostKind::GlobalZero,
        })
    }

    /// Model whose frequency-frame amplitudes are prepared by `prep`
    /// (no trainable parameters).
    pub fn from_state_prep(map: PhaseMapSpec, prep: Circuit) -> Result<Self> {
        map.validate()?;
        if prep.n_qubits() > map.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: map.n_qubits,
                got: prep.n_qubits(),
            });
        }
        Ok(DqgmModel {
            map,
            ansatz: ModelAnsatz::Prepared(prep),
            theta: Vec::new(),
            cost: CostKind::GlobalZero,
        })
    }

    pub fn with_theta(mut self, theta: Vec<f64>) -> Result<Self> {
        let expected = self.n_params();
        if theta.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: theta.len(),
            });
        }
        self.theta = theta;
        Ok(self)
    }

    pub fn n_params(&self) -> usize {
        match &self.ansatz {
            ModelAnsatz::Variational(c) => c.n_params(),
            ModelAnsatz::Prepared(_) => 0,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.map.n_qubits
    }

    /// Frequency-frame amplitudes of the comparison state at the bound
    /// parameters.
    pub fn freq_amps(&self) -> Result<Vec<Complex64>> {
        self.freq_amps_at(&self.theta)
    }

    /// Frequency-frame amplitudes at explicit parameters (parameter-shift
    /// evaluations rebind without cloning the model).
    pub fn freq_amps_at(&self, theta: &[f64]) -> Result<Vec<Complex64>> {
        let n = self.map.n_qubits;
        match &self.ansatz {
            ModelAnsatz::Variational(circuit) => {
                let psi = circuit.dagger().run(theta, 0.0)?;
                let mut a = psi.into_amplitudes();
                if self.map.basis == MapBasis::X {
                    walsh_hadamard(&mut a);
                }
                Ok(a)
            }
            ModelAnsatz::Prepared(prep) => {
                // Prepared registers narrower than the map occupy the
                // low-frequency window; high-frequency amplitudes stay zero.
                let prepared = prep.run(theta, 0.0)?.into_amplitudes();
                if prep.n_qubits() == n {
                    Ok(prepared)
                } else {
                    let mut a = vec![Complex64::ZERO; 1 << n];
                    a[..prepared.len()].copy_from_slice(&prepared);
                    Ok(a)
                }
            }
        }
    }

    /// Evaluator snapshot for repeated grid work at the bound parameters.
    pub fn evaluator(&self) -> Result<ModelEvaluator> {
        self.evaluator_at(&self.theta)
    }

    pub fn evaluator_at(&self, theta: &[f64]) -> Result<ModelEvaluator> {
        Ok(ModelEvaluator {
            frequencies: self.map.frequencies(),
            derivative_weights: self
                .map
                .phase_coefficients()
                .iter()
                .map(|phi| phi / 2.0)
                .collect(),
            a: self.freq_amps_at(theta)?,
        })
    }

    /// Frequency spectrum of the model at the bound parameters.
    pub fn spectrum(&self) -> Result<FrequencySpectrum> {
        extract_spectrum(&self.freq_amps()?, self.map.n_qubits)
    }

    /// Bit-basis sampling circuit: ansatz dagger followed by the basis
    /// transform ("revert the variational circuit, then map to bit space").
    /// Requires `xi = 1`.
    pub fn build_sampling_circuit(&self) -> Result<Circuit> {
        let transform = build_basis_transform(&self.map)?;
        match &self.ansatz {
            ModelAnsatz::Variational(circuit) => {
                let mut c = circuit.dagger();
                for op in transform.ops() {
                    c.push(op.clone())?;
                }
                Ok(c)
            }
            ModelAnsatz::Prepared(prep) => {
                // Prepared amplitudes are already frequency-frame; only the
                // QFT part of the transform applies.
                let n = self.map.n_qubits;
                let mut c = Circuit::new(n);
                for op in prep.ops() {
                    c.push(op.clone())?;
                }
                c.extend(&build_qft(n, false))?;
                Ok(c)
            }
        }
    }

    /// Sampling circuit on `m >= N` qubits. Fresh qubits carry frequencies
    /// outside the trained band and start in `|0>`, which refines the
    /// sampling comb by `2^{m-N}` bins per original bin while preserving the
    /// coarse histogram exactly.
    pub fn build_extended_sampling_circuit(&self, m: usize) -> Result<Circuit> {
        let n = self.map.n_qubits;
        if m < n {
            return Err(Error::InvalidSpec(format!(
                "extended register {m} smaller than model register {n}"
            )));
        }
        if !self.map.is_homogeneous() {
            return Err(Error::UnsupportedTransform);
        }
        let offset = m - n;
        let mut c = match &self.ansatz {
            ModelAnsatz::Variational(circuit) => {
                let mut c = circuit.dagger().embedded(m, offset)?;
                if self.map.basis == MapBasis::X {
                    for q in offset..m {
                        c.push(GateOp::h(q))?;
                    }
                }
                c
            }
            ModelAnsatz::Prepared(prep) => prep.embedded(m, m - prep.n_qubits())?,
        };
        c.extend(&build_qft(m, false))?;
        Ok(c)
    }

    /// Exact bit-basis probabilities of the sampling circuit.
    pub fn bit_probabilities(&self) -> Result<Vec<f64>> {
        let theta = self.sampling_theta();
        Ok(self.build_sampling_circuit()?.run(&theta, 0.0)?.probabilities())
    }

    /// Draw shots from the sampling circuit.
    pub fn sample(&self, shots: u64, seed: u64) -> Result<SampleSet> {
        let theta = self.sampling_theta();
        let state = self.build_sampling_circuit()?.run(&theta, 0.0)?;
        Ok(sample(&state, shots, seed))
    }

    /// Draw shots from the extended `m`-qubit sampling circuit.
    pub fn sample_extended(&self, m: usize, shots: u64, seed: u64) -> Result<SampleSet> {
        let theta = self.sampling_theta();
        let state = self.build_extended_sampling_circuit(m)?.run(&theta, 0.0)?;
        Ok(sample(&state, shots, seed))
    }

    fn sampling_theta(&self) -> Vec<f64> {
        self.theta.clone()
    }
}

/// Precomputed quantities for repeated evaluation at fixed parameters.
pub struct ModelEvaluator {
    frequencies: Vec<f64>,
    /// `m_j = phi_j / 2`, the generator weights.
    derivative_weights: Vec<f64>,
    a: Vec<Complex64>,
}

impl ModelEvaluator {
    pub fn freq_amps(&self) -> &[Complex64] {
        &self.a
    }

    /// `p(x) = |2^{-N/2} sum_l conj(a_l) e^{-i nu_l x}|^2`.
    pub fn value(&self, x: f64) -> f64 {
        let mut acc = Complex64::ZERO;
        for (a, nu) in self.a.iter().zip(self.frequencies.iter()) {
            acc += a.conj() * Complex64::from_polar(1.0, -nu * x);
        }
        acc.norm_sqr() / self.a.len() as f64
    }

    /// Model values over a whole grid, in parallel when enabled.
    pub fn values(&self, points: &[f64]) -> Vec<f64> {
        crate::parallel::map_indexed(points.len(), |i| self.value(points[i]))
    }

    /// Reversed state `U_phi(x)^dag A^dag |0>` (global phase dropped), on
    /// which the derivative cost operators are measured.
    pub fn reversed_state(&self, x: f64) -> Vec<Complex64> {
        let mut chi: Vec<Complex64> = self
            .a
            .iter()
            .zip(self.frequencies.iter())
            .map(|(a, nu)| a * Complex64::from_polar(1.0, nu * x))
            .collect();
        walsh_hadamard(&mut chi);
        chi
    }

    /// Analytic d/dx or d^2/dx^2 of the model.
    pub fn derivative(&self, x: f64, order: u8) -> f64 {
        assert!(order == 1 || order == 2, "order must be 1 or 2");
        let chi = self.reversed_state(x);
        let n = self.derivative_weights.len();
        let bit = |q: usize| 1usize << (n - 1 - q);
        if order == 1 {
            // sum_j m_j <Y_j (x) |0><0|_rest> = -2 m_j Im(conj(chi_ej) chi_0)
            let mut acc = 0.0;
            for (q, &m) in self.derivative_weights.iter().enumerate() {
                acc += m * (-2.0) * (chi[bit(q)].conj() * chi[0]).im;
            }
            acc
        } else {
            let mut acc = 0.0;
            for (q, &mq) in self.derivative_weights.iter().enumerate() {
                // -2 m_q^2 <Z_q (x) |0><0|_rest>
                acc += -2.0 * mq * mq * (chi[0].norm_sqr() - chi[bit(q)].norm_sqr());
                for (r, &mr) in self.derivative_weights.iter().enumerate().skip(q + 1) {
                    // 2 m_q m_r <Y_q Y_r (x) |0><0|_rest>
                    let cross = -2.0 * (chi[bit(q) | bit(r)].conj() * chi[0]).re
                        + 2.0 * (chi[bit(q)].conj() * chi[bit(r)]).re;
                    acc += 2.0 * mq * mr * cross;
                }
            }
            acc
        }
    }
}

/// Model value at `x`.
pub fn eval_model(model: &DqgmModel, x: f64) -> Result<f64> {
    Ok(model.evaluator()?.value(x))
}

/// Analytic first or second derivative of the model at `x`.
pub fn eval_derivative(model: &DqgmModel, x: f64, order: u8) -> Result<f64> {
    if !(order == 1 || order == 2) {
        return Err(Error::InvalidSpec(format!("derivative order {order} not in {{1, 2}}")));
    }
    Ok(model.evaluator()?.derivative(x, order))
}

/// Generalized-QCBM value: the zero-cost expectation after running the
/// ansatz forward, undoing the basis transform and undoing the feature map
/// at `x`. At integer `x` this is the bit-string probability of the ansatz
/// state; between integers it interpolates through the latent kernel.
pub fn eval_gqcbm(map: &PhaseMapSpec, ansatz: &Circuit, theta: &[f64], x: f64) -> Result<f64> {
    let mut state = ansatz.run(theta, 0.0)?;
    build_basis_transform(map)?
        .dagger()
        .apply_to(&mut state, &[], 0.0)?;
    crate::map::build_phase_map(map)?
        .dagger()
        .apply_to(&mut state, &[], x)?;
    Ok(state.amplitudes()[0].norm_sqr())
}

/// Differential cost operators for a phase map: `first` holds the `N` terms
/// of `i[M, C0]`, `second` the `O(N^2)` terms of the corrected
/// second-derivative operator `2 M C0 M - M^2 C0 - C0 M^2`.
#[derive(Clone, Debug)]
pub struct DerivativeCostOps {
    pub first: Vec<ProjectedPauliTerm>,
    pub second: Vec<ProjectedPauliTerm>,
}

impl DerivativeCostOps {
    pub fn build(map: &PhaseMapSpec) -> Result<Self> {
        map.validate()?;
        let n = map.n_qubits;
        let m: Vec<f64> = map.phase_coefficients().iter().map(|phi| phi / 2.0).collect();
        let others = |qs: &[usize]| (0..n).filter(|q| !qs.contains(q)).collect::<Vec<_>>();

        let mut first = Vec::with_capacity(n);
        for q in 0..n {
            first.push(ProjectedPauliTerm::new(
                m[q],
                [(q, PauliAxis::Y)],
                others(&[q]),
            )?);
        }
        let mut second = Vec::with_capacity(n * (n + 1) / 2);
        for q in 0..n {
            second.push(ProjectedPauliTerm::new(
                -2.0 * m[q] * m[q],
                [(q, PauliAxis::Z)],
                others(&[q]),
            )?);
            for r in q + 1..n {
                second.push(ProjectedPauliTerm::new(
                    2.0 * m[q] * m[r],
                    [(q, PauliAxis::Y), (r, PauliAxis::Y)],
                    others(&[q, r]),
                )?);
            }
        }
        Ok(DerivativeCostOps { first, second })
    }
}

/// Reversed state as a [`StateVector`], for measuring the operator form of
/// the derivative readout.
pub fn reversed_state_vector(model: &DqgmModel, x: f64) -> Result<StateVector> {
    let chi = model.evaluator()?.reversed_state(x);
    StateVector::from_amplitudes(chi)
}
