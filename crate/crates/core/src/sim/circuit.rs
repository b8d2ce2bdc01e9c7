//! Ordered gate lists with symbolic parameter slots.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::gate::{Angle, GateOp};
use crate::sim::state::StateVector;

/// An ordered list of gates on a fixed-width register. Symbolic angles refer
/// either to one of `n_params` trainable slots or to the encoded variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<GateOp>,
    n_params: usize,
    /// Slots whose bound value must be negated (introduced by `dagger`).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    negated_params: Vec<usize>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        assert!(n_qubits >= 1);
        Circuit {
            n_qubits,
            ops: Vec::new(),
            n_params: 0,
            negated_params: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Append a gate after validating its operands.
    pub fn push(&mut self, op: GateOp) -> Result<()> {
        op.validate(self.n_qubits)?;
        if let Some(Angle::Param(slot)) = op.angle {
            self.n_params = self.n_params.max(slot + 1);
        }
        self.ops.push(op);
        Ok(())
    }

    /// Allocate a fresh parameter slot.
    pub fn new_param(&mut self) -> usize {
        self.n_params += 1;
        self.n_params - 1
    }

    /// Append all gates of `other` (same register width).
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        if !other.negated_params.is_empty() {
            return Err(Error::InvalidSpec(
                "cannot extend with a daggered parametric circuit".into(),
            ));
        }
        for op in &other.ops {
            self.push(op.clone())?;
        }
        self.n_params = self.n_params.max(other.n_params);
        Ok(())
    }

    /// True when any gate carries a symbolic angle.
    pub fn has_symbolic_angles(&self) -> bool {
        self.ops.iter().any(GateOp::has_symbolic_angle)
    }

    fn effective_theta(&self, theta: &[f64]) -> Result<Vec<f64>> {
        if theta.len() != self.n_params {
            return Err(Error::DimensionMismatch {
                expected: self.n_params,
                got: theta.len(),
            });
        }
        let mut t = theta.to_vec();
        for &slot in &self.negated_params {
            t[slot] = -t[slot];
        }
        Ok(t)
    }

    /// Apply to `state` with all symbolic slots bound.
    pub fn apply_to(&self, state: &mut StateVector, theta: &[f64], x: f64) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: state.n_qubits(),
            });
        }
        let t = self.effective_theta(theta)?;
        for op in &self.ops {
            state.apply_gate(&op.bind(&t, x)?)?;
        }
        Ok(())
    }

    /// Run on `|0...0>` and return the final state.
    pub fn run(&self, theta: &[f64], x: f64) -> Result<StateVector> {
        let mut state = StateVector::zero_state(self.n_qubits);
        self.apply_to(&mut state, theta, x)?;
        Ok(state)
    }

    /// Same circuit on a wider register, every operand shifted up by
    /// `offset`. Parameter slots and dagger bookkeeping are preserved.
    pub fn embedded(&self, n_qubits: usize, offset: usize) -> Result<Circuit> {
        let mut c = Circuit {
            n_qubits,
            ops: Vec::with_capacity(self.ops.len()),
            n_params: self.n_params,
            negated_params: self.negated_params.clone(),
        };
        for op in &self.ops {
            let shifted = GateOp {
                kind: op.kind,
                targets: op.targets.iter().map(|q| q + offset).collect(),
                controls: op.controls.iter().map(|q| q + offset).collect(),
                angle: op.angle,
            };
            shifted.validate(n_qubits)?;
            c.ops.push(shifted);
        }
        Ok(c)
    }

    /// Inverse circuit: reversed gate order with negated angles. Parameter
    /// slots keep their indices; their bound values are negated on use, so
    /// `c.dagger()` evaluated at `theta` is the inverse of `c` at `theta`.
    pub fn dagger(&self) -> Circuit {
        let mut ops = Vec::with_capacity(self.ops.len());
        let mut negated = self.negated_params.clone();
        for op in self.ops.iter().rev() {
            let (inv, negate_param) = op.dagger();
            if negate_param {
                if let Some(Angle::Param(slot)) = inv.angle {
                    match negated.iter().position(|&s| s == slot) {
                        // Double negation cancels (slot reused across layers
                        // is not supported; ansätze allocate unique slots).
                        Some(pos) => {
                            negated.swap_remove(pos);
                        }
                        None => negated.push(slot),
                    }
                }
            }
            ops.push(inv);
        }
        Circuit {
            n_qubits: self.n_qubits,
            ops,
            n_params: self.n_params,
            negated_params: negated,
        }
    }
}
