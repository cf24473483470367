use thiserror::Error;

/// Errors raised by the geometry toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("invalid extension degree {0}")]
    InvalidDegree(u32),
    #[error("field order {0} is too large for table arithmetic")]
    FieldTooLarge(u64),
    #[error("modulus is not monic of degree {0}")]
    BadModulus(u32),
    #[error("modulus is reducible over the prime field")]
    ReducibleModulus,
    #[error("root of the modulus is not a primitive element")]
    NonPrimitiveModulus,
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} does not divide the extension degree {1}")]
    NotADivisor(u32, u32),
    #[error("zero has no quadratic character")]
    ZeroSquareTest,
    #[error("element {0} is not in the subfield")]
    NotInSubfield(u32),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("zero vector does not define a point")]
    ZeroVector,
    #[error("enumeration of {count} objects exceeds the budget of {budget}")]
    BudgetExceeded { count: u128, budget: u128 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
