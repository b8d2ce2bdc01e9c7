//! Projected Pauli operators and their expectation values.
//!
//! A [`ProjectedPauliTerm`] is `coefficient * P (x) Pi` where `P` is a Pauli
//! string and `Pi` forces a disjoint set of qubits onto `|0><0|`. Disjoint
//! supports with a real coefficient make every term Hermitian, so sums of
//! terms have real expectation values.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sim::state::StateVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

#[derive(Clone, Debug)]
pub struct ProjectedPauliTerm {
    pub coefficient: f64,
    pub pauli: BTreeMap<usize, PauliAxis>,
    pub zero_projector_qubits: BTreeSet<usize>,
}

impl ProjectedPauliTerm {
    pub fn new(
        coefficient: f64,
        pauli: impl IntoIterator<Item = (usize, PauliAxis)>,
        zero_projector_qubits: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let term = ProjectedPauliTerm {
            coefficient,
            pauli: pauli.into_iter().collect(),
            zero_projector_qubits: zero_projector_qubits.into_iter().collect(),
        };
        for q in term.pauli.keys() {
            if term.zero_projector_qubits.contains(q) {
                return Err(Error::OverlappingSupport { index: *q });
            }
        }
        Ok(term)
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        for &q in self.pauli.keys().chain(self.zero_projector_qubits.iter()) {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits,
                });
            }
            if self.pauli.contains_key(&q) && self.zero_projector_qubits.contains(&q) {
                return Err(Error::OverlappingSupport { index: q });
            }
        }
        Ok(())
    }
}

/// `sum_k coeff_k <psi| P_k Pi_k |psi>` as a real number.
///
/// Each term contributes `conj(psi_i) * phase * psi_j` over indices `i` whose
/// projector qubits read 0, with `j = i` bit-flipped on the X/Y support.
pub fn expectation(state: &StateVector, terms: &[ProjectedPauliTerm]) -> Result<f64> {
    let n = state.n_qubits();
    let amps = state.amplitudes();
    let mut total = Complex64::ZERO;
    for term in terms {
        term.validate(n)?;
        let mut flip = 0usize;
        let mut proj = 0usize;
        for (&q, &axis) in &term.pauli {
            if axis != PauliAxis::Z {
                flip |= 1 << (n - 1 - q);
            }
        }
        for &q in &term.zero_projector_qubits {
            proj |= 1 << (n - 1 - q);
        }
        let mut acc = Complex64::ZERO;
        for (i, amp) in amps.iter().enumerate() {
            if i & proj != 0 {
                continue;
            }
            let j = i ^ flip;
            let mut phase = Complex64::ONE;
            for (&q, &axis) in &term.pauli {
                let bit_i = state.bit(i, q);
                phase *= match axis {
                    PauliAxis::X => Complex64::ONE,
                    // Y|0> = i|1>, Y|1> = -i|0>: the row index decides.
                    PauliAxis::Y => {
                        if bit_i == 1 {
                            Complex64::I
                        } else {
                            -Complex64::I
                        }
                    }
                    PauliAxis::Z => {
                        if bit_i == 1 {
                            -Complex64::ONE
                        } else {
                            Complex64::ONE
                        }
                    }
                };
            }
            acc += amp.conj() * phase * amps[j];
        }
        total += Complex64::new(term.coefficient, 0.0) * acc;
    }
    debug_assert!(
        total.im.abs() < 1e-12,
        "imaginary residue {:.3e} on a Hermitian sum",
        total.im
    );
    Ok(total.re)
}
