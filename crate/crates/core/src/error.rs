use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("qubit count {0} is outside the supported range {min}..={max}", min = crate::state::MIN_QUBITS, max = crate::state::MAX_QUBITS)]
    QubitCount(usize),

    #[error("qubit {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("gate acts twice on qubit {0}")]
    RepeatedQubit(usize),

    #[error("operator is not unitary (tolerance {tol:e})")]
    NotUnitary { tol: f64 },

    #[error("state vector is not normalised: squared norm {0}")]
    NotNormalized(f64),

    #[error("probability {0} is outside [0, 1]")]
    Probability(f64),

    #[error("invalid Kraus channel: {0}")]
    InvalidChannel(String),

    #[error("invalid observable use: {0}")]
    Observable(String),

    #[error("invalid ansatz: {0}")]
    Ansatz(String),

    #[error("expected {expected} parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },

    #[error("noise configuration mismatch: {0}")]
    NoiseMismatch(String),

    #[error("{0}")]
    Invalid(String),
}
