use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field parameter d={0}: must be a negative squarefree integer")]
    InvalidField(i64),
    #[error("operands belong to different fields (d={0} and d={1})")]
    FieldMismatch(i64, i64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse `{token}`: {reason}")]
    Parse { token: String, reason: String },
    #[error("ideal generators are all zero")]
    ZeroIdeal,
    #[error("{0} is not a prime")]
    NotPrime(String),
    #[error("element must be non-zero and not a unit")]
    UnitOrZero,
    #[error("valuation of zero is infinite")]
    ZeroElement,
    #[error("element is not a unit mod the ideal")]
    NotInvertible,
    #[error("element lies in the prime ideal")]
    InPrime,
    #[error("element has absolute value 1 (root of unity)")]
    RootOfUnity,
    #[error("prime list is empty")]
    EmptyPrimeList,
    #[error("prime list contains a repeated prime")]
    RepeatedPrime,
    #[error("exponent tuple is all zero")]
    ZeroTuple,
    #[error("exponent tuple has length {got}, expected {expected}")]
    TupleLength { expected: usize, got: usize },
    #[error("invalid IFS: {0}")]
    InvalidIfs(String),
    #[error("size cap exceeded: {needed} > {cap}")]
    CapExceeded { needed: String, cap: u64 },
    #[error("invalid depth list: {0}")]
    InvalidDepths(String),
    #[error("point is not in the alpha-adic ring")]
    NotInDAlpha,
    #[error("no theorem case applies; use bounded mode")]
    NoApplicableCase,
    #[error("invalid coding: {0}")]
    InvalidCoding(String),
    #[error("digit {0} is out of range")]
    DigitOutOfRange(String),
    #[error("operation requires the Gaussian field (d=-1), got d={0}")]
    NotGaussian(i64),
    #[error("expansion did not terminate within {0} steps")]
    StepCap(u64),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
