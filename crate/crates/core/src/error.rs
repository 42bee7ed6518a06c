use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Caller supplied something outside an operation's domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{0} undefined on empty set")]
    EmptySet(&'static str),

    #[error("undefined risk: {0}")]
    UndefinedRisk(&'static str),

    #[error("not realizable: {0}")]
    NotRealizable(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("exhaustive search over n = {n} items exceeds the cap of {cap}; use greedy or local-swap search")]
    CapExceeded { n: usize, cap: usize },

    #[error("evaluation budget exceeded: {required} subsets > budget {budget}; sample with fixed-k search or use a smaller k")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownName {
        kind: &'static str,
        name: String,
        available: String,
    },
}

impl Error {
    /// Whether the error stems from bad input rather than a failed computation.
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::NonConvergence { .. })
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
