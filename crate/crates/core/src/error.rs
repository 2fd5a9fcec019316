use thiserror::Error;

/// Failures surfaced by the library. Verification *outcomes* (a conjecture
/// failing on some grid point, say) are reported in the returned reports,
/// not through this type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("odds p/(1-p) are undefined at p = 1")]
    DivisionAtOne,

    #[error("sample space too large: {cardinality} outcomes exceeds cap {cap}")]
    SpaceTooLarge { cardinality: String, cap: u64 },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("vectors have different sums")]
    SumMismatch,

    #[error("vectors have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("chain elements {index} and {next} are not majorization-comparable", next = .index + 1)]
    IncomparableChain { index: usize },

    #[error("sequence is not strictly convex at position {index}")]
    ConvexityViolation { index: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
