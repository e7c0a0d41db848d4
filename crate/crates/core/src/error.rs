use thiserror::Error;

/// Errors raised by model construction and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid belief: {0}")]
    InvalidBelief(String),

    #[error("invalid decision problem: {0}")]
    InvalidProblem(String),

    #[error("invalid information measure: {0}")]
    InvalidMeasure(String),

    #[error("kl divergence needs a strictly positive reference, coordinate {0} is zero")]
    ZeroReference(usize),

    #[error("distribution is not Bayes-plausible: barycenter off by {residual:e}")]
    NotBayesPlausible { residual: f64 },

    #[error("invalid posterior distribution: {0}")]
    InvalidDistribution(String),

    #[error("information amount must be nonnegative, got {0}")]
    NegativeEta(f64),

    #[error("grid of {points} points exceeds the cap of {cap}")]
    GridTooLarge { points: usize, cap: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("value function is affine: fewer than two undominated actions")]
    AffineValue,

    #[error("prior lies on a decision-region boundary; no positive flat threshold exists")]
    BoundaryPrior,

    #[error(
        "budget {eta} is not below the full-information amount {limit}; \
         the budget cap must stay under every amount that attains the maximal value"
    )]
    BudgetCap { eta: f64, limit: f64 },

    #[error(
        "budget {eta} already attains the full-information max-min value {value}; \
         the budget cap must stay under every amount that attains the maximal value"
    )]
    MaxminCap { eta: f64, value: f64 },

    #[error("budget {eta} is infeasible: the grid attains at most {max_amount}")]
    Infeasible { eta: f64, max_amount: f64 },

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("line {line}, column {column}: {message}")]
    Malformed {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("linear program failed: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;
