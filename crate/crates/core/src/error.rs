use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("series truncation bounds differ ({0} vs {1})")]
    MismatchedBounds(usize, usize),
    #[error("geometric factor needs a positive degree")]
    ZeroDegreeFactor,
    #[error("coefficient at degree {0} is not an integer")]
    NonIntegral(usize),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("group closure exceeds the cap of {0} elements")]
    GroupTooLarge(usize),
    #[error("unsupported action for this operation: {0}")]
    UnsupportedAction(String),
    #[error("exponent vector has length {got}, action expects {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("operands belong to different actions")]
    ActionMismatch,
    #[error("malformed encoding `{0}`: {1}")]
    Parse(String, String),
    #[error("{0} out of range")]
    OutOfRange(String),
    #[error("infeasible degree sequence: first offending degree {0}")]
    InfeasibleDegrees(usize),
    #[error("product of parameter degrees is not divisible by the group order")]
    NotDivisible,
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("candidate reduces to zero against the basis")]
    ReducesToZero,
    #[error("invariant enumeration exhausted at degree {degree}: found {found} of {expected} secondaries")]
    EnumerationExhausted {
        degree: usize,
        found: usize,
        expected: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
