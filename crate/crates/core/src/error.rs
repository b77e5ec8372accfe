use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("alist line {line}: {msg}")]
    Alist { line: usize, msg: String },

    #[error("invalid parity-check matrix: {0}")]
    InvalidCode(String),

    #[error("infeasible degree combination: {0}")]
    InfeasibleDegrees(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("symbol {symbol} out of range for dimension {dim}")]
    SymbolOutOfRange { symbol: usize, dim: usize },

    #[error("invalid linear map: {0}")]
    InvalidMap(String),

    #[error("linear map is singular (rank {rank} < {dim})")]
    SingularMap { rank: usize, dim: usize },

    #[error("user {user} average energy {average} exceeds budget {budget}")]
    EnergyExceeded {
        user: usize,
        average: f64,
        budget: f64,
    },

    #[error("invalid signaling: {0}")]
    InvalidSignaling(String),

    #[error("enumeration bound exceeded: {0}")]
    EnumerationBound(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
