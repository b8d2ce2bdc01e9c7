//! Dense statevector simulator.
//!
//! Gate application acts on strided amplitude pairs without materializing
//! matrices; expectation values support sums of projected Pauli terms; and
//! projective sampling builds one cumulative table per state. Registers up
//! to roughly 24 qubits are practical.

mod circuit;
mod gate;
mod pauli;
mod prepare;
mod qft;
mod sample;
mod state;

pub use circuit::Circuit;
pub use gate::{Angle, ConcreteGate, GateKind, GateOp};
pub use pauli::{expectation, PauliAxis, ProjectedPauliTerm};
pub use prepare::prepare_real_state;
pub use qft::build_qft;
pub use sample::{sample, SampleSet};
pub use state::StateVector;

use crate::error::Result;

/// Apply one fully bound gate to a state. Convenience wrapper over
/// [`StateVector::apply_gate`] mirroring the free-function call style.
pub fn apply_gate(state: &mut StateVector, gate: &ConcreteGate) -> Result<()> {
    state.apply_gate(gate)
}

/// `<ref|rho_keep|ref>` after tracing out every qubit not in `keep`.
pub fn reduced_fidelity(
    state: &StateVector,
    keep: &[usize],
    reference: &StateVector,
) -> Result<f64> {
    state.reduced_fidelity(keep, reference)
}
