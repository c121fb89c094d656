use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while validating inputs or evaluating.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("negative mass in {what}: {value}")]
    NegativeMass { what: String, value: f64 },

    #[error("bad interval: [{a}, {b}) requires a < b")]
    BadInterval { a: f64, b: f64 },

    #[error("overlapping pieces: [{a1}, {b1}) and [{a2}, {b2})")]
    OverlappingPieces { a1: f64, b1: f64, a2: f64, b2: f64 },

    #[error("base point must be positive, got {x}")]
    NonPositiveX { x: f64 },

    #[error("order must be positive, got {lambda}")]
    NonPositiveLambda { lambda: f64 },

    #[error("evaluation point {re}+{im}i lies on the cut (-inf, 0]")]
    OnCut { re: f64, im: f64 },

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown function '{name}' at position {pos}")]
    UnknownFunction { pos: usize, name: String },

    #[error("domain error: {msg}")]
    Domain { msg: String },

    #[error("jet order {available} is insufficient, need {needed}")]
    InsufficientOrder { needed: usize, available: usize },

    #[error("bad indices: j={j} must not exceed k={k}")]
    BadIndices { j: usize, k: usize },

    #[error("index {index} out of range for sequence of length {len}")]
    OutOfRange { index: usize, len: usize },

    #[error("sequence of length {available} too short, need {needed}")]
    InsufficientLength { needed: usize, available: usize },

    #[error("not a completely monotone sequence: entry (n={n}, k={k}) = {value}")]
    NotCompletelyMonotone { n: usize, k: usize, value: f64 },

    #[error("order pair requires lambda < lambda', got {lambda} and {lambda_prime}")]
    BadOrderPair { lambda: f64, lambda_prime: f64 },

    #[error("formula cross-check mismatch at (n={n}, k={k}): {detail}")]
    FormulaMismatch { n: usize, k: usize, detail: String },

    #[error("bad spec: {msg}")]
    BadSpec { msg: String },

    #[error("precision error: {msg}")]
    Precision { msg: String },

    #[error("i/o error: {msg}")]
    Io { msg: String },
}
