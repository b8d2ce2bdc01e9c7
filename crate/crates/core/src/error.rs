use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("duplicate qubit index {index} in gate operands")]
    DuplicateQubit { index: usize },

    #[error("symbolic angle is unbound; bind parameters and x before applying")]
    UnboundAngle,

    #[error("gate {0} does not take an angle")]
    UnexpectedAngle(&'static str),

    #[error("gate {0} requires an angle")]
    MissingAngle(&'static str),

    #[error("parameter slot {slot} out of range for {n_params} parameters")]
    ParamOutOfRange { slot: usize, n_params: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("amplitude vector is not normalized: |norm^2 - 1| = {deviation:.3e}")]
    NotNormalized { deviation: f64 },

    #[error("length {0} is not a power of two")]
    NonPowerOfTwo(usize),

    #[error("Pauli and projector supports overlap on qubit {index}")]
    OverlappingSupport { index: usize },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("basis transform requires xi = 1 on every qubit (squeezed maps are training-only)")]
    UnsupportedTransform,

    #[error("normal equations are singular; retry with a positive regularization lambda")]
    SingularSystem,

    #[error("quantile argument {0} outside the open interval (0, 1)")]
    QuantileDomain(f64),

    #[error("covariance matrix is not positive semi-definite (rho = {0})")]
    NotPositiveSemiDefinite(f64),

    #[error("empty grid: at least one point is required")]
    EmptyGrid,

    #[error("grid has no target values")]
    MissingTargets,

    #[error("target series admits no normalized real amplitude vector: {0}")]
    InfeasibleSeries(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
