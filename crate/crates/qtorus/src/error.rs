use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("level must be at least 3, got {0}")]
    InvalidLevel(i64),

    #[error("elements live at different levels ({0} and {1})")]
    LevelMismatch(u32, u32),

    #[error("division by zero")]
    DivisionByZero,

    /// X is irrational, so a sum of an even and an odd X-power never
    /// appears in a correct computation.
    #[error("cannot add scalars with X-powers of different parity ({0} and {1})")]
    GradingMismatch(i64, i64),

    #[error("X-grading did not cancel: result has xpow {0}")]
    GradingNotCanceled(i64),

    #[error("basis index {index} out of range 1..={max}")]
    IndexOutOfRange { index: i64, max: i64 },

    #[error("tensor slot {slot} out of range for rank {rank}")]
    SlotOutOfRange { slot: usize, rank: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("slope ({0}, {1}) has no continued fraction expansion; use a degenerate move word")]
    DegenerateSlope(i64, i64),

    #[error("({0}, {1}) is not a primitive slope")]
    NotPrimitive(i64, i64),

    #[error("scalar rings differ")]
    MixedRings,

    #[error("nested-sum oracle would need {terms} terms (limit {limit})")]
    OracleTooLarge { terms: u128, limit: u128 },

    #[error("verification failed at {location}: {lhs} != {rhs}")]
    VerificationFailed { location: String, lhs: String, rhs: String },

    #[error("malformed serialized value: {0}")]
    Malformed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
