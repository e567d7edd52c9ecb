use thiserror::Error;

/// Errors produced by spectrum validation and quantity evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular value {0} is negative")]
    NegativeValue(f64),
    #[error("singular value {0} exceeds 1; construct with rescaling to accept")]
    ValueAboveOne(f64),
    #[error("singular value {0} is not finite")]
    NonFiniteValue(f64),
    #[error("all singular values are zero")]
    AllZero,
    #[error("dimension {0} is below the minimum of 2")]
    TooSmallDimension(usize),
    #[error("outcome dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("measurement set has no outcomes")]
    EmptySet,
    #[error("harmonic number order must be at least 1")]
    NonPositiveOrder,
    #[error("coefficient order {order} outside the valid range 0..={max}")]
    OrderOutOfRange { order: usize, max: usize },
    #[error("squared group values coincide; regroup with a larger tolerance")]
    SingularGap,
    #[error("Bell polynomial of order {order} needs that many inputs, got {got}")]
    InsufficientInput { order: usize, got: usize },
    #[error("squared singular values too close for the naive route (min gap {gap:e}, threshold {threshold:e}); use the grouped evaluator")]
    DegenerateSpectrum { gap: f64, threshold: f64 },
    #[error("measurement set incomplete: |sum of squared norms - d| = {defect:e} exceeds tolerance {tolerance:e}")]
    IncompleteSet { defect: f64, tolerance: f64 },
    #[error("invalid measurement family parameters: {0}")]
    BadParams(String),
    #[error("projector rank {rank} outside 1..={dim}")]
    RankOutOfRange { rank: usize, dim: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
