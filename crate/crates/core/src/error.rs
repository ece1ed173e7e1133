use thiserror::Error;

/// Broad category of a failure, used by front ends to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed input or a call that makes no sense for its arguments.
    Usage,
    /// A mathematical precondition of a bound or procedure is not met.
    Hypothesis,
    /// A size or time budget was exceeded.
    Resource,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation not supported over {0}")]
    UnsupportedRing(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),
    #[error("arity mismatch: expected {expected}, got {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("variable index {index} out of range for arity {arity}")]
    VariableOutOfRange { index: usize, arity: usize },
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid condition fails: {0}")]
    GridCondition(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("monomial {0:?} is not in the support")]
    NotInSupport(Vec<u32>),
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("exponent {0} exceeds the limit of 1000000")]
    ExponentOverflow(u64),
    #[error("grid of {points} points exceeds the limit of {limit}")]
    GridTooLarge { points: u128, limit: u128 },
    #[error("search space of {size} candidates exceeds the budget of {budget}")]
    BudgetExceeded { size: u128, budget: u128 },
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::ZeroPolynomial
            | Error::GridCondition(_)
            | Error::Hypothesis(_)
            | Error::NotInSupport(_)
            | Error::DivisionByZero => ErrorClass::Hypothesis,
            Error::GridTooLarge { .. } | Error::BudgetExceeded { .. } | Error::Overflow(_) => {
                ErrorClass::Resource
            }
            _ => ErrorClass::Usage,
        }
    }

    /// Stable machine-readable identifier.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::RingMismatch(..) => "ring_mismatch",
            Error::DivisionByZero => "division_by_zero",
            Error::UnsupportedRing(_) => "unsupported_ring",
            Error::NotPrime(_) => "not_prime",
            Error::InvalidModulus(_) => "invalid_modulus",
            Error::ArityMismatch { .. } => "arity_mismatch",
            Error::VariableOutOfRange { .. } => "variable_out_of_range",
            Error::ZeroPolynomial => "zero_polynomial",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::GridCondition(_) => "grid_condition",
            Error::Hypothesis(_) => "hypothesis_violation",
            Error::NotInSupport(_) => "not_in_support",
            Error::Syntax { .. } => "syntax_error",
            Error::UnknownVariable(_) => "unknown_variable",
            Error::ExponentOverflow(_) => "exponent_overflow",
            Error::GridTooLarge { .. } => "grid_too_large",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::Overflow(_) => "overflow",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
