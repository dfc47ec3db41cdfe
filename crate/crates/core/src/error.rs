use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },

    #[error("gate acts on duplicate qubit {qubit}")]
    DuplicateQubit { qubit: usize },

    #[error("expected {expected} parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },

    #[error("operator length {got} does not match system size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("state vector has {got} amplitudes, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state norm {norm} is not 1")]
    NotNormalized { norm: f64 },

    #[error("invalid Pauli character '{found}' at position {position}")]
    PauliParse { position: usize, found: char },

    #[error("line {line}: {message}")]
    HamiltonianParse { line: usize, message: String },

    #[error("system size {n} exceeds supported maximum {max}")]
    TooManyQubits { n: usize, max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("estimator failure: {0}")]
    Estimator(String),

    #[error("training failure: {0}")]
    Training(String),

    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),
}

pub type Result<T> = std::result::Result<T, Error>;
