//! Phase feature map, basis transformation, sparsification and spectrum.
//!
//! The phase feature map encodes a real variable `x` into per-qubit phases
//! `phi_j = 2 pi / (2^j xi_j)` (qubits labeled `j = 1..N` from the most
//! significant bit). Bound at `x` it produces the unentangled latent state
//!
//! ```text
//! |x~> = 2^{-N/2} (x)_j ( |0>_j + exp(-i phi_j x) |1>_j )
//! ```
//!
//! up to a global phase, so basis state `l` carries relative phase
//! `exp(-i nu_l x)` with `nu_l = 2 pi l / 2^N` when `xi = 1`. Latent states
//! at integer `x` are then mapped bijectively onto computational basis
//! states by a QFT-family transform; the direction and SWAP placement are
//! pinned by the bijection test rather than by convention.
//!
//! Two printed forms of the map are supported: `ZH` applies a Hadamard then
//! an RZ rotation, `X` applies one RX rotation. They differ by a Hadamard
//! layer, which the matching basis transforms absorb, so every
//! transform-level quantity is identical between the two.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{build_qft, Angle, Circuit, GateOp};

/// Which printed form of the per-qubit encoding to emit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapBasis {
    /// Hadamard followed by RZ, as printed in the main construction.
    ZH,
    /// Single RX rotation; the transform appends an extra Hadamard layer.
    X,
}

/// Phase feature map specification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseMapSpec {
    pub n_qubits: usize,
    /// Per-qubit squeeze coefficients; all ones by default.
    pub xi: Vec<f64>,
    pub basis: MapBasis,
}

impl PhaseMapSpec {
    /// Homogeneous map (`xi = 1`) in the ZH form.
    pub fn new(n_qubits: usize) -> Self {
        PhaseMapSpec {
            n_qubits,
            xi: vec![1.0; n_qubits],
            basis: MapBasis::ZH,
        }
    }

    pub fn with_basis(mut self, basis: MapBasis) -> Self {
        self.basis = basis;
        self
    }

    pub fn with_xi(mut self, xi: Vec<f64>) -> Self {
        self.xi = xi;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(Error::InvalidSpec("phase map needs at least one qubit".into()));
        }
        if self.xi.len() != self.n_qubits {
            return Err(Error::InvalidSpec(format!(
                "xi has {} entries for {} qubits",
                self.xi.len(),
                self.n_qubits
            )));
        }
        if self.xi.iter().any(|&x| x == 0.0 || !x.is_finite()) {
            return Err(Error::InvalidSpec(
                "xi coefficients must be finite and nonzero".into(),
            ));
        }
        Ok(())
    }

    pub fn is_homogeneous(&self) -> bool {
        self.xi.iter().all(|&x| x == 1.0)
    }

    /// Period of the induced model in `x` (`2^N` for the homogeneous map).
    pub fn period(&self) -> f64 {
        (1u64 << self.n_qubits) as f64
    }

    /// Per-qubit phase coefficients `phi_j = 2 pi / (2^j xi_j)`, indexed by
    /// code qubit `q = j - 1`.
    pub fn phase_coefficients(&self) -> Vec<f64> {
        (0..self.n_qubits)
            .map(|q| 2.0 * PI / ((1u64 << (q + 1)) as f64 * self.xi[q]))
            .collect()
    }

    /// Frequencies `nu_l` of all `2^N` latent basis components (`2 pi l /
    /// 2^N` when `xi = 1`).
    pub fn frequencies(&self) -> Vec<f64> {
        let phi = self.phase_coefficients();
        let dim = 1usize << self.n_qubits;
        (0..dim)
            .map(|l| {
                let mut nu = 0.0;
                for (q, phi_q) in phi.iter().enumerate() {
                    if (l >> (self.n_qubits - 1 - q)) & 1 == 1 {
                        nu += phi_q;
                    }
                }
                nu
            })
            .collect()
    }

    /// Amplitudes of the latent state bound at `x`, global phase dropped:
    /// `2^{-N/2} exp(-i nu_l x)`. This is the ZH-frame (phase-state) form;
    /// the X form differs by a Hadamard layer.
    pub fn latent_amplitudes(&self, x: f64) -> Vec<Complex64> {
        let scale = 1.0 / ((1u64 << self.n_qubits) as f64).sqrt();
        self.frequencies()
            .iter()
            .map(|nu| Complex64::from_polar(scale, -nu * x))
            .collect()
    }
}

/// Circuit form of the phase feature map, with one `x` slot per rotation.
pub fn build_phase_map(spec: &PhaseMapSpec) -> Result<Circuit> {
    spec.validate()?;
    let phi = spec.phase_coefficients();
    let mut c = Circuit::new(spec.n_qubits);
    for (q, &phi_q) in phi.iter().enumerate() {
        match spec.basis {
            MapBasis::ZH => {
                c.push(GateOp::h(q))?;
                c.push(GateOp::rz(q, Angle::X(-phi_q)))?;
            }
            MapBasis::X => {
                c.push(GateOp::rx(q, Angle::X(-phi_q)))?;
            }
        }
    }
    Ok(c)
}

/// Transform mapping the `2^N` integer latent states onto the computational
/// basis, exactly and bijectively (up to per-state phase). Only `xi = 1` is
/// supported; squeezed maps are training-only.
pub fn build_basis_transform(spec: &PhaseMapSpec) -> Result<Circuit> {
    spec.validate()?;
    if !spec.is_homogeneous() {
        return Err(Error::UnsupportedTransform);
    }
    let mut c = Circuit::new(spec.n_qubits);
    if spec.basis == MapBasis::X {
        for q in 0..spec.n_qubits {
            c.push(GateOp::h(q))?;
        }
    }
    c.extend(&build_qft(spec.n_qubits, false))?;
    Ok(c)
}

/// Qubit layout of the sparsified map: `N` register qubits, then the seed,
/// then the ancilla. Returns `(seed, ancilla)`.
pub fn sparsified_layout(n_qubits: usize) -> (usize, usize) {
    (n_qubits, n_qubits + 1)
}

/// Sparsified phase map on `N + 2` qubits (register + seed + ancilla).
///
/// The register qubit holding the second-lowest frequency (`j = N - 1`,
/// code index `N - 2`) receives only half its rotation; the other half is
/// carried by the seed and merged onto the register through a parity
/// ancilla. Mid-circuit measurement is deferred: a CNOT disentangles the
/// seed and an `x`-dependent controlled phase undoes the odd-parity branch,
/// so the reduced register state equals the direct map exactly.
///
/// `split` is the code index of the sparsified register qubit and must be
/// `N - 2`; other splits are a configuration extension.
pub fn build_sparsified_map(spec: &PhaseMapSpec, split: usize) -> Result<Circuit> {
    spec.validate()?;
    let n = spec.n_qubits;
    if n < 2 {
        return Err(Error::InvalidSpec(
            "sparsification needs at least two register qubits".into(),
        ));
    }
    if split != n - 2 {
        return Err(Error::InvalidSpec(format!(
            "split must designate register qubit {} (second-lowest frequency), got {}",
            n - 2,
            split
        )));
    }
    let (seed, ancilla) = sparsified_layout(n);
    let phi = spec.phase_coefficients();
    let half = phi[split] / 2.0;
    let mut c = Circuit::new(n + 2);

    for (q, &phi_q) in phi.iter().enumerate() {
        if q == split {
            continue;
        }
        c.push(GateOp::h(q))?;
        c.push(GateOp::rz(q, Angle::X(-phi_q)))?;
    }
    // Half rotation on the register qubit, half on the seed.
    c.push(GateOp::h(split))?;
    c.push(GateOp::rz(split, Angle::X(-half)))?;
    c.push(GateOp::h(seed))?;
    c.push(GateOp::rz(seed, Angle::X(-half)))?;
    // Parity of (register, seed) collected on the ancilla.
    c.push(GateOp::cnot(split, ancilla))?;
    c.push(GateOp::cnot(seed, ancilla))?;
    // Deferred corrections: disentangle the seed, then apply the
    // x-dependent phase on the odd-parity branch.
    c.push(GateOp::cnot(split, seed))?;
    c.push(GateOp::cphase(ancilla, split, Angle::X(-2.0 * half)))?;

    if spec.basis == MapBasis::X {
        for q in 0..n {
            c.push(GateOp::h(q))?;
        }
    }
    Ok(c)
}

/// Frequency-domain description of a model: coefficients `c_k` such that
/// `p(x) = sum_k c_k exp(i k w0 x)` with `w0 = 2 pi / 2^N`.
#[derive(Clone, Debug)]
pub struct FrequencySpectrum {
    pub base_frequency: f64,
    pub coefficients: BTreeMap<i64, Complex64>,
}

impl FrequencySpectrum {
    pub fn c(&self, k: i64) -> Complex64 {
        self.coefficients.get(&k).copied().unwrap_or(Complex64::ZERO)
    }

    /// Re-sum the series at `x`.
    pub fn evaluate(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .map(|(&k, c)| (c * Complex64::from_polar(1.0, k as f64 * self.base_frequency * x)).re)
            .sum()
    }

    /// Largest `|k|` with a coefficient above `tol`.
    pub fn max_frequency(&self, tol: f64) -> i64 {
        self.coefficients
            .iter()
            .filter(|(_, c)| c.norm() > tol)
            .map(|(&k, _)| k.abs())
            .max()
            .unwrap_or(0)
    }
}

/// Spectrum of the model induced by frequency-frame amplitudes `a`
/// (the ansatz output expanded over the latent basis):
/// `c_k = 2^{-N} sum_l conj(a_l) a_{l+k}`, so `c_{-k} = conj(c_k)` and
/// `c_0 = 2^{-N}` for any normalized input.
pub fn extract_spectrum(amps: &[Complex64], n_qubits: usize) -> Result<FrequencySpectrum> {
    let dim = 1usize << n_qubits;
    if amps.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: amps.len(),
        });
    }
    let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if (norm2 - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized {
            deviation: (norm2 - 1.0).abs(),
        });
    }
    let scale = 1.0 / dim as f64;
    let mut coefficients = BTreeMap::new();
    for k in -(dim as i64 - 1)..=(dim as i64 - 1) {
        let mut acc = Complex64::ZERO;
        for l in 0..dim as i64 {
            let lp = l + k;
            if (0..dim as i64).contains(&lp) {
                acc += amps[l as usize].conj() * amps[lp as usize];
            }
        }
        coefficients.insert(k, scale * acc);
    }
    Ok(FrequencySpectrum {
        base_frequency: 2.0 * PI / dim as f64,
        coefficients,
    })
}

/// In-place normalized Walsh-Hadamard transform (`H` on every qubit).
pub(crate) fn walsh_hadamard(amps: &mut [Complex64]) {
    let n = amps.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (amps[i], amps[i + h]);
                amps[i] = a + b;
                amps[i + h] = a - b;
            }
        }
        h *= 2;
    }
    let scale = 1.0 / (n as f64).sqrt();
    amps.iter_mut().for_each(|a| *a *= scale);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::sim::{reduced_fidelity, GateKind, StateVector};
    use rand::Rng;

    #[test]
    fn phase_coefficients_strictly_decreasing() {
        let spec = PhaseMapSpec::new(5);
        let phi = spec.phase_coefficients();
        assert!((phi[0] - PI).abs() < 1e-15);
        for w in phi.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn single_qubit_map_at_zero_is_plus_state() {
        let c = build_phase_map(&PhaseMapSpec::new(1)).unwrap();
        let s = c.run(&[], 0.0).unwrap();
        for a in s.amplitudes() {
            assert!((a.norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        }
        let ratio = s.amplitudes()[1] / s.amplitudes()[0];
        assert!((ratio - Complex64::ONE).norm() < 1e-12);
    }

    #[test]
    fn per_qubit_phases_at_x_one() {
        // N = 2, xi = 1, x = 1: |1> components carry e^{-i pi} and
        // e^{-i pi/2} relative to |0>.
        let c = build_phase_map(&PhaseMapSpec::new(2)).unwrap();
        let s = c.run(&[], 1.0).unwrap();
        let a = s.amplitudes();
        let r1 = a[0b10] / a[0b00]; // qubit 1 excited (code qubit 0, MSB)
        let r2 = a[0b01] / a[0b00]; // qubit 2 excited
        assert!((r1 - Complex64::from_polar(1.0, -PI)).norm() < 1e-12);
        assert!((r2 - Complex64::from_polar(1.0, -PI / 2.0)).norm() < 1e-12);
    }

    #[test]
    fn circuit_matches_product_formula_at_x_five() {
        let spec = PhaseMapSpec::new(3);
        let circuit = build_phase_map(&spec).unwrap();
        let s = circuit.run(&[], 5.0).unwrap();
        let reference = spec.latent_amplitudes(5.0);
        // Equal up to one global phase.
        let overlap: Complex64 = s
            .amplitudes()
            .iter()
            .zip(reference.iter())
            .map(|(a, b)| b.conj() * a)
            .sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn x_basis_state_is_hadamard_image_of_zh_state() {
        let spec = PhaseMapSpec::new(3);
        let zh = build_phase_map(&spec).unwrap().run(&[], 2.3).unwrap();
        let x = build_phase_map(&spec.clone().with_basis(MapBasis::X))
            .unwrap()
            .run(&[], 2.3)
            .unwrap();
        let mut amps = zh.amplitudes().to_vec();
        walsh_hadamard(&mut amps);
        let overlap: Complex64 = x
            .amplitudes()
            .iter()
            .zip(amps.iter())
            .map(|(a, b)| b.conj() * a)
            .sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transform_bijects_integer_latent_states() {
        for basis in [MapBasis::ZH, MapBasis::X] {
            let spec = PhaseMapSpec::new(6).with_basis(basis);
            let map = build_phase_map(&spec).unwrap();
            let transform = build_basis_transform(&spec).unwrap();
            for l in 0..64usize {
                let mut s = map.run(&[], l as f64).unwrap();
                transform.apply_to(&mut s, &[], 0.0).unwrap();
                let p = s.amplitudes()[l].norm_sqr();
                assert!((p - 1.0).abs() < 1e-12, "basis {basis:?} l={l}");
            }
        }
    }

    #[test]
    fn transform_at_zero_maps_to_all_zeros() {
        let spec = PhaseMapSpec::new(4);
        let mut s = build_phase_map(&spec).unwrap().run(&[], 0.0).unwrap();
        build_basis_transform(&spec)
            .unwrap()
            .apply_to(&mut s, &[], 0.0)
            .unwrap();
        assert!((s.amplitudes()[0].norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn squeezed_map_rejected_by_transform() {
        let spec = PhaseMapSpec::new(2).with_xi(vec![1.0, 2.0]);
        assert!(matches!(
            build_basis_transform(&spec),
            Err(Error::UnsupportedTransform)
        ));
    }

    #[test]
    fn sparsified_register_matches_direct_map() {
        for basis in [MapBasis::ZH, MapBasis::X] {
            let spec = PhaseMapSpec::new(4).with_basis(basis);
            let sparse = build_sparsified_map(&spec, 2).unwrap();
            let direct = build_phase_map(&spec).unwrap();
            let mut r = rng::root(17);
            for _ in 0..20 {
                let x: f64 = r.random::<f64>() * 16.0;
                let full = sparse.run(&[], x).unwrap();
                let reference = direct.run(&[], x).unwrap();
                let f = reduced_fidelity(&full, &[0, 1, 2, 3], &reference).unwrap();
                assert!(f >= 1.0 - 1e-10, "basis {basis:?} x={x}: fidelity {f}");
            }
        }
    }

    #[test]
    fn sparsified_register_uniform_at_zero() {
        let spec = PhaseMapSpec::new(3);
        let full = build_sparsified_map(&spec, 1).unwrap().run(&[], 0.0).unwrap();
        let uniform = build_phase_map(&spec).unwrap().run(&[], 0.0).unwrap();
        let f = reduced_fidelity(&full, &[0, 1, 2], &uniform).unwrap();
        assert!(f >= 1.0 - 1e-10);
    }

    #[test]
    fn sparsified_angles_match_frequency_split() {
        // Seed rotation coefficient phi_N, merged register rotation 2 phi_N.
        let n = 5;
        let spec = PhaseMapSpec::new(n);
        let c = build_sparsified_map(&spec, n - 2).unwrap();
        let (seed, _) = sparsified_layout(n);
        let phi_n = 2.0 * PI / (1u64 << n) as f64;
        let seed_coeff = c
            .ops()
            .iter()
            .find_map(|op| match (op.kind, op.angle) {
                (GateKind::RZ, Some(Angle::X(coeff))) if op.targets == [seed] => Some(coeff.abs()),
                _ => None,
            })
            .expect("seed rotation present");
        assert!((seed_coeff - phi_n).abs() < 1e-15);
        let correction = c
            .ops()
            .iter()
            .find_map(|op| match (op.kind, op.angle) {
                (GateKind::CPHASE, Some(Angle::X(coeff))) => Some(coeff.abs()),
                _ => None,
            })
            .expect("x-dependent correction present");
        assert!((correction - 2.0 * phi_n).abs() < 1e-15);
    }

    #[test]
    fn invalid_split_rejected() {
        let spec = PhaseMapSpec::new(4);
        assert!(build_sparsified_map(&spec, 0).is_err());
        assert!(build_sparsified_map(&spec, 3).is_err());
    }

    #[test]
    fn spectrum_c0_is_inverse_dimension() {
        let mut r = rng::root(3);
        for n in 1..=4usize {
            let dim = 1 << n;
            let mut v: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5))
                .collect();
            let norm: f64 = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            v.iter_mut().for_each(|a| *a /= norm);
            let sp = extract_spectrum(&v, n).unwrap();
            assert!((sp.c(0).re - 1.0 / dim as f64).abs() < 1e-12);
            assert!(sp.c(0).im.abs() < 1e-12);
            assert!((sp.c(3) - sp.c(-3).conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn uniform_amplitudes_give_product_of_cosines_coefficients() {
        // Frequency amplitudes of the N = 2 product-of-cosines model are
        // uniform; its k = 3 cosine coefficient is 1/8, i.e. c_3 = 1/16.
        let a = vec![Complex64::new(0.5, 0.0); 4];
        let sp = extract_spectrum(&a, 2).unwrap();
        assert!((sp.c(3).re - 1.0 / 16.0).abs() < 1e-12);
        assert!(sp.c(3).im.abs() < 1e-12);
        // Multiplicity of pairs at offset k is 2^N - k.
        assert!((sp.c(1).re - 3.0 / 16.0).abs() < 1e-12);
        assert!((sp.c(2).re - 2.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn basis_variants_agree_through_their_transforms() {
        // transform . map is the same state preparation for both variants,
        // for every real x.
        let mut r = rng::root(23);
        for _ in 0..10 {
            let x: f64 = r.random::<f64>() * 8.0;
            let states: Vec<StateVector> = [MapBasis::ZH, MapBasis::X]
                .into_iter()
                .map(|basis| {
                    let spec = PhaseMapSpec::new(3).with_basis(basis);
                    let mut s = build_phase_map(&spec).unwrap().run(&[], x).unwrap();
                    build_basis_transform(&spec)
                        .unwrap()
                        .apply_to(&mut s, &[], 0.0)
                        .unwrap();
                    s
                })
                .collect();
            for (a, b) in states[0].amplitudes().iter().zip(states[1].amplitudes()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }
}
