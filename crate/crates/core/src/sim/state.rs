//! Dense statevector and gate kernels.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::parallel;
use crate::sim::gate::{ConcreteGate, GateKind};

/// `2^n` complex amplitudes with unit norm. Qubit 0 is the most significant
/// bit of every basis-state index.
#[derive(Clone, Debug)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on `n` qubits.
    pub fn zero_state(n: usize) -> Self {
        assert!(n >= 1, "register needs at least one qubit");
        let mut amps = vec![Complex64::ZERO; 1 << n];
        amps[0] = Complex64::ONE;
        StateVector { n_qubits: n, amps }
    }

    /// Build from explicit amplitudes; the length must be a power of two and
    /// the vector normalized to 1e-9.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::NonPowerOfTwo(len));
        }
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized {
                deviation: (norm2 - 1.0).abs(),
            });
        }
        Ok(StateVector {
            n_qubits: len.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    /// Bit value of `qubit` inside basis index `i` (qubit 0 = MSB).
    #[inline]
    pub fn bit(&self, i: usize, qubit: usize) -> usize {
        (i >> (self.n_qubits - 1 - qubit)) & 1
    }

    /// Bit position (from LSB) carrying `qubit`.
    #[inline]
    fn pos(&self, qubit: usize) -> usize {
        self.n_qubits - 1 - qubit
    }

    pub fn norm_sqr(&self) -> f64 {
        parallel::sum_indexed(self.amps.len(), |i| self.amps[i].norm_sqr())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let mut acc = Complex64::ZERO;
        for (a, b) in self.amps.iter().zip(other.amps.iter()) {
            acc += a.conj() * b;
        }
        Ok(acc)
    }

    /// Apply a fully bound gate. The state is rebuilt out of place; disjoint
    /// output entries make the parallel path deterministic.
    pub fn apply_gate(&mut self, gate: &ConcreteGate) -> Result<()> {
        for &q in gate.targets.iter().chain(gate.controls.iter()) {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
        }
        match gate.kind {
            GateKind::SWAP => {
                let pa = self.pos(gate.targets[0]);
                let pb = self.pos(gate.targets[1]);
                let old = std::mem::take(&mut self.amps);
                self.amps = parallel::map_indexed(old.len(), |i| {
                    let (ba, bb) = ((i >> pa) & 1, (i >> pb) & 1);
                    if ba == bb {
                        old[i]
                    } else {
                        old[i ^ (1 << pa) ^ (1 << pb)]
                    }
                });
            }
            GateKind::CZ | GateKind::CPHASE => {
                // Diagonal: phase on the all-ones subspace of control+target.
                let mask = gate
                    .targets
                    .iter()
                    .chain(gate.controls.iter())
                    .fold(0usize, |m, &q| m | (1 << self.pos(q)));
                let phase = match gate.kind {
                    GateKind::CZ => Complex64::new(-1.0, 0.0),
                    _ => Complex64::from_polar(1.0, gate.angle.ok_or(Error::UnboundAngle)?),
                };
                parallel::for_each_mut(&mut self.amps, |i, a| {
                    if i & mask == mask {
                        *a *= phase;
                    }
                });
            }
            _ => {
                let m = gate.single_qubit_matrix().expect("single-qubit matrix");
                let pt = self.pos(gate.targets[0]);
                let tmask = 1usize << pt;
                let cmask = gate
                    .controls
                    .iter()
                    .fold(0usize, |acc, &q| acc | (1 << self.pos(q)));
                let old = std::mem::take(&mut self.amps);
                self.amps = parallel::map_indexed(old.len(), |i| {
                    if i & cmask != cmask {
                        return old[i];
                    }
                    if i & tmask == 0 {
                        m[0] * old[i] + m[1] * old[i | tmask]
                    } else {
                        m[2] * old[i & !tmask] + m[3] * old[i]
                    }
                });
            }
        }
        Ok(())
    }

    /// `<ref|rho_keep|ref>` where `rho_keep` traces out every qubit not in
    /// `keep`. `reference` must be defined on exactly the kept qubits, in the
    /// order given.
    pub fn reduced_fidelity(&self, keep: &[usize], reference: &StateVector) -> Result<f64> {
        if reference.dim() != 1 << keep.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << keep.len(),
                got: reference.dim(),
            });
        }
        for &q in keep {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
        }
        let discarded: Vec<usize> = (0..self.n_qubits).filter(|q| !keep.contains(q)).collect();
        // <ref|rho|ref> = sum_e |<ref (x) e|psi>|^2 over discarded basis e.
        let mut overlaps = vec![Complex64::ZERO; 1 << discarded.len()];
        for (i, amp) in self.amps.iter().enumerate() {
            let mut k = 0usize;
            for (pos, &q) in keep.iter().enumerate() {
                k |= self.bit(i, q) << (keep.len() - 1 - pos);
            }
            let mut e = 0usize;
            for (pos, &q) in discarded.iter().enumerate() {
                e |= self.bit(i, q) << (discarded.len() - 1 - pos);
            }
            overlaps[e] += reference.amps[k].conj() * amp;
        }
        Ok(overlaps.iter().map(|o| o.norm_sqr()).sum())
    }
}
