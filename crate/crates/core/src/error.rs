use thiserror::Error;

/// Errors raised by the exact factorization and update routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    /// A division that must be exact left a remainder. This is always an
    /// internal invariant violation or a broken precondition upstream.
    #[error("non-exact division: {numer} / {denom}")]
    NonExactDivision { numer: String, denom: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular (no nonzero pivot at step {step})")]
    SingularMatrix { step: usize },
    #[error("zero pivot at step {step}")]
    ZeroPivot { step: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("leading principal minor {step} is zero")]
    SingularLeadingMinor { step: usize },
    #[error("update vector is zero")]
    ZeroUpdateVector,
    #[error("update is a no-op (gamma = 0)")]
    NoOpUpdate,
    #[error("updated matrix has no usable pivot at step {step}")]
    SingularUpdate { step: usize },
    #[error("adjacent permutation at {k} is not applicable: {reason}")]
    PermutationNotApplicable { k: usize, reason: &'static str },
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("gamma is not integral: 1/{0} does not divide the update vector")]
    NonIntegerGamma(String),
    #[error("degenerate SR1 denominator (u - Bs)'s = 0")]
    DegenerateDenominator,
    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::NonExactDivision { .. } | Error::OracleMismatch(_))
    }
}
