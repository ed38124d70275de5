//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Operands have incompatible shapes.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A parameter is outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Unknown preset design name.
    #[error("unknown preset '{name}'; valid names: {valid}")]
    UnknownPreset { name: String, valid: String },

    /// A construction precondition (C1/C2 style) failed on the inputs.
    #[error("condition {condition} violated: {detail}")]
    ConditionViolation { condition: String, detail: String },

    /// An exhaustive enumeration would exceed the configured budget.
    #[error("enumeration budget exceeded: {required} evaluations needed, budget is {budget}; use sampled mode or raise the budget")]
    BudgetExceeded { required: u128, budget: u64 },

    /// The scaling-candidate pool ran out before a working value was found.
    #[error("scaling pool exhausted at symbol index {symbol} (1-based)")]
    PoolExhausted { symbol: usize },

    /// Design file could not be parsed at all.
    #[error("malformed design file: {0}")]
    Malformed(String),

    /// Design file has an unsupported format version.
    #[error("unsupported design file version {found}, expected {expected}")]
    VersionMismatch { found: i64, expected: i64 },

    /// Design file parsed but its fields contradict each other.
    #[error("inconsistent design file: {0}")]
    Inconsistent(String),

    /// A declared group structure failed verification where a verified one is required.
    #[error("group structure failed verification: {0}")]
    UnverifiedStructure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
