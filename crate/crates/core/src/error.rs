use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("ambient dimension {requested} exceeds the guard limit {limit}")]
    GuardExceeded { requested: usize, limit: usize },

    #[error("degenerate pairing: rank {rank} < {dim}")]
    DegeneratePairing { rank: usize, dim: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("level {level} out of range 0..={max}")]
    LevelOutOfRange { level: usize, max: usize },

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("need at least {needed} series coefficients, have {have}")]
    InsufficientCoefficients { needed: usize, have: usize },

    #[error("missing exchange data: {0}")]
    MissingExchange(String),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error("replay failed: {0}")]
    Replay(String),
}

pub type Result<T> = std::result::Result<T, Error>;
