use thiserror::Error;

/// Errors raised by the simulator and the classical helpers around it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("basis index {index} out of range for {n_qubits} qubits")]
    IndexOutOfRange { index: u64, n_qubits: usize },

    #[error("qubit {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("{n_qubits} qubits exceeds the configured limit of {limit}")]
    TooManyQubits { n_qubits: usize, limit: usize },

    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("unknown gate `{0}`")]
    UnknownGate(String),

    #[error("control equals target (qubit {0})")]
    ControlEqualsTarget(usize),

    #[error("invalid qubit set: {0}")]
    InvalidQubitSet(String),

    #[error("oracle shape mismatch: {0}")]
    OracleShape(String),

    #[error("{0} is not coprime to the modulus {1}")]
    NotCoprime(u64, u64),

    #[error("number theory domain error: {0}")]
    Domain(String),

    #[error("modulus {0} exceeds the supported integer range")]
    ModulusTooLarge(u64),

    #[error("insufficient rank: have {rank}, need {needed}")]
    InsufficientRank { rank: usize, needed: usize },

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
