use thiserror::Error;

/// Errors surfaced by the numerical core.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error(
        "combined atom count {size} exceeds the solver cap {cap}; \
         coarsen the inputs with quantile_sample before calling the exact solver"
    )]
    SizeCapExceeded { size: usize, cap: usize },

    #[error("brute-force oracle limited to {max} atoms, got {n}")]
    BruteForceTooLarge { n: usize, max: usize },

    #[error("operands must be equal-weight measures with the same atom count ({0})")]
    MismatchedAtoms(String),

    #[error("moment order {have} is below the requested order {need}")]
    MomentOrderTooSmall { have: usize, need: usize },

    #[error(
        "moment order {k} exceeds the combinatorial cap {cap}: the centering \
         recursion enumerates word expansions whose count grows exponentially in k, \
         so higher orders need an explicit cap override"
    )]
    CombinatorialCapExceeded { k: usize, cap: usize },

    #[error("word budget exceeded: length {length} * power {power} > {budget}")]
    WordBudgetExceeded { length: usize, power: usize, budget: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not unitary: max |U*U - I| drift {drift:.3e} exceeds {limit:.1e}")]
    NotUnitary { drift: f64, limit: f64 },

    #[error("matrix is not self-adjoint: max |X - X*| drift {drift:.3e}")]
    NotHermitian { drift: f64 },

    #[error("operator norm {norm:.6} exceeds 1 beyond tolerance")]
    NormExceedsOne { norm: f64 },

    #[error("eigensolver failure: {detail}")]
    Eigensolver { detail: String },

    #[error("path parameter t = {t} exceeds the ladder length {stages}")]
    LadderRangeExceeded { t: f64, stages: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("serialization error: {0}")]
    Serialization(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
