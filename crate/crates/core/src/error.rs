use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for {total} qubits")]
    QubitOutOfRange { index: usize, total: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("circuit layout does not match state ({circuit} vs {state} qubits)")]
    LayoutMismatch { circuit: usize, state: usize },

    #[error("unknown register `{0}`")]
    UnknownRegister(String),

    #[error("value {value} does not fit in register `{register}` of width {width}")]
    RegisterValue {
        register: String,
        value: u64,
        width: usize,
    },

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("shots must be at least 1")]
    ZeroShots,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("lambda {lambda} for index {index} does not fit in {d} qubits")]
    LambdaOverflow { index: usize, lambda: u64, d: u32 },

    #[error("register D is not |0> on branch {0}")]
    DirtyRegister(usize),

    #[error("wrong transduction variant: expected {0}")]
    WrongVariant(&'static str),

    #[error("state of {qubits} qubits needs {bytes} bytes, budget is {budget}")]
    MemoryBudget { qubits: usize, bytes: u64, budget: u64 },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("acceptance comparison failed: {0}")]
    Comparison(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::LambdaOverflow { .. } => 3,
            Error::MemoryBudget { .. } => 4,
            Error::Comparison(_) => 5,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => 6,
            _ => 2,
        }
    }
}
