//! Gate descriptions.
//!
//! A [`GateOp`] is a gate kind plus operand qubits and an optional angle.
//! Angles are either fixed radians or symbolic slots: a trainable parameter
//! index, or the encoded variable `x` scaled by a fixed coefficient.
//! Rotation conventions: `RZ(phi) = diag(e^{-i phi/2}, e^{+i phi/2})`,
//! `RX(phi) = cos(phi/2) I - i sin(phi/2) X`,
//! `RY(phi) = cos(phi/2) I - i sin(phi/2) Y`,
//! `CPHASE(theta) = diag(1, 1, 1, e^{i theta})`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    RX,
    RY,
    RZ,
    CNOT,
    CZ,
    CPHASE,
    SWAP,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::RX => "RX",
            GateKind::RY => "RY",
            GateKind::RZ => "RZ",
            GateKind::CNOT => "CNOT",
            GateKind::CZ => "CZ",
            GateKind::CPHASE => "CPHASE",
            GateKind::SWAP => "SWAP",
        }
    }

    /// Rotation kinds carry exactly one angle; CPHASE carries a phase angle.
    pub fn takes_angle(self) -> bool {
        matches!(
            self,
            GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::CPHASE
        )
    }
}

/// A gate angle: fixed, a trainable parameter slot, or `coeff * x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Angle {
    Fixed(f64),
    /// Trainable parameter slot index.
    Param(usize),
    /// The encoded variable times a fixed coefficient.
    X(f64),
}

impl Angle {
    /// Resolve against a parameter vector and a value of `x`.
    pub fn resolve(self, theta: &[f64], x: f64) -> Result<f64> {
        match self {
            Angle::Fixed(v) => Ok(v),
            Angle::Param(slot) => theta.get(slot).copied().ok_or(Error::ParamOutOfRange {
                slot,
                n_params: theta.len(),
            }),
            Angle::X(coeff) => Ok(coeff * x),
        }
    }

    fn negated(self) -> Self {
        match self {
            Angle::Fixed(v) => Angle::Fixed(-v),
            Angle::Param(_) => self, // handled by the circuit-level dagger
            Angle::X(c) => Angle::X(-c),
        }
    }
}

/// One gate in a circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub controls: Vec<usize>,
    pub angle: Option<Angle>,
}

impl GateOp {
    fn new(kind: GateKind, targets: Vec<usize>, controls: Vec<usize>, angle: Option<Angle>) -> Self {
        GateOp {
            kind,
            targets,
            controls,
            angle,
        }
    }

    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, vec![q], vec![], None)
    }
    pub fn x(q: usize) -> Self {
        Self::new(GateKind::X, vec![q], vec![], None)
    }
    pub fn y(q: usize) -> Self {
        Self::new(GateKind::Y, vec![q], vec![], None)
    }
    pub fn z(q: usize) -> Self {
        Self::new(GateKind::Z, vec![q], vec![], None)
    }
    pub fn rx(q: usize, angle: Angle) -> Self {
        Self::new(GateKind::RX, vec![q], vec![], Some(angle))
    }
    pub fn ry(q: usize, angle: Angle) -> Self {
        Self::new(GateKind::RY, vec![q], vec![], Some(angle))
    }
    pub fn rz(q: usize, angle: Angle) -> Self {
        Self::new(GateKind::RZ, vec![q], vec![], Some(angle))
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Self::new(GateKind::CNOT, vec![target], vec![control], None)
    }
    pub fn cz(control: usize, target: usize) -> Self {
        Self::new(GateKind::CZ, vec![target], vec![control], None)
    }
    pub fn cphase(control: usize, target: usize, angle: Angle) -> Self {
        Self::new(GateKind::CPHASE, vec![target], vec![control], Some(angle))
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Self::new(GateKind::SWAP, vec![a, b], vec![], None)
    }

    /// Check operand indices and the angle arity against the gate kind.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let mut seen = Vec::with_capacity(self.targets.len() + self.controls.len());
        for &q in self.targets.iter().chain(self.controls.iter()) {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits,
                });
            }
            if seen.contains(&q) {
                return Err(Error::DuplicateQubit { index: q });
            }
            seen.push(q);
        }
        match (self.kind.takes_angle(), self.angle.is_some()) {
            (true, false) => Err(Error::MissingAngle(self.kind.name())),
            (false, true) => Err(Error::UnexpectedAngle(self.kind.name())),
            _ => Ok(()),
        }
    }

    /// Resolve symbolic angles into a concrete gate.
    pub fn bind(&self, theta: &[f64], x: f64) -> Result<ConcreteGate> {
        let angle = match self.angle {
            Some(a) => Some(a.resolve(theta, x)?),
            None => None,
        };
        Ok(ConcreteGate {
            kind: self.kind,
            targets: self.targets.clone(),
            controls: self.controls.clone(),
            angle,
        })
    }

    /// Inverse gate. `Param` slots keep their index; the circuit-level
    /// dagger records the sign flip so bound values are negated there.
    pub fn dagger(&self) -> (Self, bool) {
        match self.kind {
            GateKind::H | GateKind::X | GateKind::Y | GateKind::Z | GateKind::CNOT
            | GateKind::CZ | GateKind::SWAP => (self.clone(), false),
            GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::CPHASE => {
                let angle = self.angle.expect("rotation gate with angle");
                match angle {
                    Angle::Param(_) => (self.clone(), true),
                    other => (
                        GateOp {
                            angle: Some(other.negated()),
                            ..self.clone()
                        },
                        false,
                    ),
                }
            }
        }
    }

    pub fn has_symbolic_angle(&self) -> bool {
        matches!(self.angle, Some(Angle::Param(_)) | Some(Angle::X(_)))
    }
}

/// A fully bound gate, ready to apply to a state.
#[derive(Clone, Debug)]
pub struct ConcreteGate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub controls: Vec<usize>,
    pub angle: Option<f64>,
}

impl ConcreteGate {
    /// 2x2 matrix of the single-qubit action, row-major.
    pub(crate) fn single_qubit_matrix(&self) -> Option<[num_complex::Complex64; 4]> {
        use num_complex::Complex64 as C;
        let one = C::new(1.0, 0.0);
        let zero = C::new(0.0, 0.0);
        let i = C::new(0.0, 1.0);
        match self.kind {
            GateKind::H => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                Some([C::new(h, 0.0), C::new(h, 0.0), C::new(h, 0.0), C::new(-h, 0.0)])
            }
            GateKind::X | GateKind::CNOT => Some([zero, one, one, zero]),
            GateKind::Y => Some([zero, -i, i, zero]),
            GateKind::Z | GateKind::CZ => Some([one, zero, zero, -one]),
            GateKind::RX => {
                let half = self.angle.expect("bound angle") / 2.0;
                let (s, c) = half.sin_cos();
                Some([C::new(c, 0.0), C::new(0.0, -s), C::new(0.0, -s), C::new(c, 0.0)])
            }
            GateKind::RY => {
                let half = self.angle.expect("bound angle") / 2.0;
                let (s, c) = half.sin_cos();
                Some([C::new(c, 0.0), C::new(-s, 0.0), C::new(s, 0.0), C::new(c, 0.0)])
            }
            GateKind::RZ => {
                let half = self.angle.expect("bound angle") / 2.0;
                Some([C::from_polar(1.0, -half), zero, zero, C::from_polar(1.0, half)])
            }
            GateKind::CPHASE => {
                let theta = self.angle.expect("bound angle");
                Some([one, zero, zero, C::from_polar(1.0, theta)])
            }
            GateKind::SWAP => None,
        }
    }
}
