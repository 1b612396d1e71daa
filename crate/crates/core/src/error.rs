use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {0} is outside the supported range 1..=20")]
    QubitCountOutOfRange(usize),

    #[error("qubit index {index} is out of range for a {n_qubits}-qubit register")]
    QubitIndexOutOfRange { index: usize, n_qubits: usize },

    #[error("CNOT control and target must differ (both are qubit {0})")]
    ControlEqualsTarget(usize),

    #[error("circuit acts on {circuit} qubits but the state has {state}")]
    QubitCountMismatch { circuit: usize, state: usize },

    #[error("invalid amplitude vector: {0}")]
    InvalidAmplitudes(String),

    #[error("degenerate feature bounds: min_cycle={min} must be below max_cycle={max}")]
    DegenerateBounds { min: u32, max: u32 },

    #[error("normalized feature {0} lies outside [-1, 1]")]
    FeatureOutOfRange(f64),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("parameter vector has length {got}, expected {expected}")]
    ParamLengthMismatch { expected: usize, got: usize },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("unsupported model schema_version {0} (this build reads version 1)")]
    SchemaVersionUnsupported(u64),

    #[error("malformed model file: {0}")]
    MalformedModelFile(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("loss became non-finite ({value}) at iteration {iteration}")]
    NonFiniteLoss { value: f64, iteration: usize },

    #[error("finite-difference step must be positive, got {0}")]
    InvalidStep(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed CSV at line {line}: {reason}")]
    MalformedCsv { line: usize, reason: String },

    #[error("duplicate cycle {0}")]
    DuplicateCycle(u32),

    #[error("non-positive capacity at line {line}")]
    NonPositiveCapacity { line: usize },

    #[error("missing metadata line `# {0}=...`")]
    MissingMetadata(&'static str),

    #[error("series has {got} records, at least {min} required")]
    TooFewRecords { got: usize, min: usize },

    #[error("split leaves {train} training and {test} test records; both must be non-empty")]
    DegenerateSplit { train: usize, test: usize },

    #[error("train fraction {0} must lie strictly between 0 and 1")]
    InvalidFraction(f64),

    #[error("rated capacity must be positive, got {0}")]
    NonPositiveRated(f64),

    #[error("length mismatch: {left} measured values vs {right} predictions")]
    LengthMismatch { left: usize, right: usize },

    #[error("metric input is empty")]
    EmptyInput,

    #[error("reference value at index {0} is zero; MAPE undefined")]
    ZeroReference(usize),

    #[error("sweep grid has {runs} runs, above the cap of {cap}")]
    GridTooLarge { runs: usize, cap: usize },
}
