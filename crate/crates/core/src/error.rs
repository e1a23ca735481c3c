use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{requested} qubits exceeds the cap of {max}")]
    TooManyQubits { requested: usize, max: usize },

    #[error("state needs at least one qubit")]
    NoQubits,

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("qubit {qubit} out of range for a {num_qubits}-qubit state")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("CNOT control and target are both qubit {0}")]
    SameControlTarget(usize),

    #[error("qubit {0} listed more than once")]
    DuplicateQubit(usize),

    #[error("invalid subset: {0}")]
    InvalidSubset(String),

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("invalid bitstring {0:?}")]
    InvalidBits(String),

    #[error("cat label needs at least two qubits, got {0}")]
    DegenerateCat(usize),

    #[error("{what} = {value} outside [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: i64,
        min: i64,
        max: i64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("state is not a cat state (analyzer readout probability {0})")]
    NotACat(f64),

    #[error("cannot measure the last remaining qubit with a residual")]
    LastQubit,

    #[error("{path}: {message}")]
    Config { path: String, message: String },

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn range(what: &'static str, value: usize, min: usize, max: usize) -> Self {
        Error::OutOfRange {
            what,
            value: value as i64,
            min: min as i64,
            max: max as i64,
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
