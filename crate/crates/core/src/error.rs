use thiserror::Error;

/// Errors raised by the algebra, counting and bound evaluators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    CompositeP(u64),
    #[error("modulus is reducible over F_{p}")]
    ReducibleModulus { p: u64 },
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("field of order {p}^{s} does not fit the 32-bit element encoding")]
    FieldTooLarge { p: u64, s: usize },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("gcd of two zero polynomials is undefined")]
    BothZero,
    #[error("degree {found} too low, need at least {needed}")]
    DegreeTooLow { needed: usize, found: usize },
    #[error("divided difference needs at least one node")]
    EmptyPoints,
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("linear forms have rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("parameter out of range: {0}")]
    ParameterRange(String),
    #[error("family is empty")]
    EmptyFamily,
    #[error("oracle budget exceeded: needs {needed} steps, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
