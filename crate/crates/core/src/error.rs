use thiserror::Error;

/// Errors shared across the arithmetic layers.
///
/// Every failure mode is a data-level condition; none of them should be
/// reachable from well-formed inputs that satisfy the documented
/// preconditions.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("operands belong to different local field specs")]
    SpecMismatch,
    #[error("element is not divisible by the uniformizer")]
    NotDivisible,
    #[error("precision exhausted{}", match .0 { Some(i) => format!(" at coefficient {i}"), None => String::new() })]
    PrecisionExhausted(Option<usize>),
    #[error("division by zero in a finite field")]
    DivisionByZero,
    #[error("no embedding: source degree {0} does not divide target degree {1}")]
    NoEmbedding(usize, usize),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("fixed space has F_q-dimension {found}, expected {expected}")]
    FixedSpaceDeficient { expected: usize, found: usize },
    #[error("operands belong to different coefficient fields")]
    FieldMismatch,
    #[error("series is not a unit (leading coefficient zero or unknown)")]
    NotAUnit,
    #[error("composition diverges: inner series has valuation <= 0")]
    CompositionDiverges,
    #[error("series is not a 1-unit")]
    NotAOneUnit,
    #[error("exponent denominator is divisible by p")]
    DenominatorDivisibleByP,
    #[error("exponent {0} out of range for (q,n)=({1},{2})")]
    OutOfRange(i64, u64, usize),
    #[error("enumeration space q^n = {0} exceeds the guard")]
    TooLarge(u128),
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("exponent h={0} is not q-primitive")]
    NotPrimitive(i64),
    #[error("lambda must be nonzero")]
    ZeroLambda,
    #[error("base-change matrix is not invertible")]
    NotInvertible,
    #[error("inertia pair is incompatible: zeta^d != residue(u)")]
    IncompatiblePair,
    #[error("product vector shape does not match the module")]
    ShapeMismatch,
    #[error("search failed: {0}")]
    SearchFailed(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
