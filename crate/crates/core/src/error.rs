use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} is not a power of two (>= 2)")]
    NotPowerOfTwo(usize),

    #[error("qubit index {index} out of range 1..={n}")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("duplicate qubit index {0}")]
    DuplicateQubit(usize),

    #[error("partial trace needs a nonempty set of kept qubits")]
    EmptyKeep,

    #[error("operator is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid dephasing generator: {0}")]
    InvalidGenerator(String),

    #[error("negative evolution time {0}")]
    NegativeTime(f64),

    #[error("empty generator list")]
    EmptyGenerators,

    #[error("collective noise requires ratio > 0, got {0}")]
    InvalidRatio(f64),

    #[error("unknown gate name '{0}'")]
    UnknownGate(String),

    #[error("scenario {scenario} cannot be built on {n} qubits")]
    ScenarioMismatch { scenario: String, n: usize },

    #[error("zero-norm reference state for axis {0}")]
    ZeroNorm(char),

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("invalid axis '{0}' (expected x, y or z)")]
    InvalidAxis(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
