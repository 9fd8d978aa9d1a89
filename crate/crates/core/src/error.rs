use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {d}: {reason}")]
    InvalidDimension { d: usize, reason: &'static str },

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// The zero direction has every feasible point as a minimizer.
    #[error("ambiguous LMO query: the search direction is zero")]
    ZeroQuery,

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    /// An unassigned coordinate would be active in the resisting oracle's answer.
    #[error("zero-chain violation at coordinate {coordinate}: |p|/lambda = {ratio:e} exceeds next weight {weight:e}")]
    ZeroChainViolation {
        coordinate: usize,
        ratio: f64,
        weight: f64,
    },

    #[error("incomplete bound parameters for {theorem}: missing `{missing}`")]
    IncompleteBound {
        theorem: &'static str,
        missing: &'static str,
    },

    #[error("degenerate active set: {0}")]
    DegenerateActiveSet(&'static str),

    #[error("instance mismatch: {0}")]
    InstanceMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
