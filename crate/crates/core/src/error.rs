use thiserror::Error;

/// Every failure the simulator can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{field} must be positive (got {value})")]
    NonPositiveRate { field: &'static str, value: f64 },

    #[error("{field} must be non-negative (got {value})")]
    NegativeValue { field: &'static str, value: f64 },

    #[error("{field} must be finite (got {value})")]
    NonFinite { field: &'static str, value: f64 },

    #[error("zero qubit-resonator detuning: omega_q equals omega_r ({omega})")]
    ZeroDetuning { omega: f64 },

    #[error("n_th must be non-negative (got {0})")]
    NegativeOccupancy(f64),

    #[error("temperature_ratio must be positive (got {0})")]
    NonPositiveRatio(f64),

    #[error("n_th = {n_th} is inconsistent with temperature_ratio = {ratio} (expects {expected})")]
    InconsistentOccupancy { n_th: f64, ratio: f64, expected: f64 },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("step {dt} exceeds the resolution limit {limit}")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("measurement time tau must be positive (got {0})")]
    NonPositiveTau(f64),

    #[error("target fidelity must lie in (0, 1) (got {0})")]
    FidelityOutOfRange(f64),

    #[error("initial sigma_z {0} outside [-1, 1]")]
    SigmaOutOfRange(f64),

    #[error("phi_plus + phi_minus vanishes")]
    DegenerateDenominator,

    #[error("unsupported oracle configuration: {0}")]
    UnsupportedCombination(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("Fock truncation must be at least 2 (got {0})")]
    InvalidTruncation(usize),

    #[error("Liouvillian has no unique steady state")]
    SingularGenerator,

    #[error("exponential fit failed: {0}")]
    FitDiverged(String),

    #[error("invalid experiment: {0}")]
    InvalidExperiment(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
