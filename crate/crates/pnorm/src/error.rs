use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix entries must be finite (no NaN/Inf)")]
    NonFinite,

    #[error("exponent must lie in [1, inf], got {0}")]
    InvalidExponent(f64),

    #[error("no exact formula for (p, q) = ({p}, {q}); use the estimator")]
    UnsupportedExponents { p: String, q: String },

    #[error("grid oracle budget exceeded: {points} points > {budget}")]
    BudgetExceeded { points: u128, budget: u128 },

    #[error("block index {index} out of range (k = {k})")]
    IndexOutOfRange { index: usize, k: usize },

    #[error("operation requires a block-diagonal algebra")]
    NotBlockDiagonal,

    #[error("element does not belong to the algebra (residual {residual:e} > tol {tol:e})")]
    NotInAlgebra { residual: f64, tol: f64 },

    #[error("basis is not linearly independent (rank {rank} < {expected})")]
    DependentBasis { rank: usize, expected: usize },

    #[error("basis is not closed under multiplication (residual {0:e})")]
    NotClosed(f64),

    #[error("elements live over different algebras or sizes")]
    AlgebraMismatch,

    #[error("composition parts must be positive and nonempty")]
    BadComposition,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
