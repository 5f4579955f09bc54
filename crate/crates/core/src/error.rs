use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("state has escaped to infinity")]
    EscapedState,
    #[error("every stationary sample escaped ({restarts} restarts)")]
    EscapeDominates { restarts: usize },
    #[error("threshold infeasible: tau/n = {ratio} exceeds the available mass")]
    InfeasibleThreshold { ratio: f64 },
    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("non-finite value at index {index}")]
    NonFiniteInput { index: usize },
    #[error("degenerate sample (standard deviation {std_dev:e})")]
    DegenerateSample { std_dev: f64 },
    #[error("optimizer did not converge after {iterations} iterations (gradient norm {grad_norm:e})")]
    NonConvergence { iterations: usize, grad_norm: f64 },
    #[error("no admissible GEV parameters for this sample")]
    SupportViolation,
    #[error("block minimum distance is zero at index {index}")]
    ZeroDistance { index: usize },
    #[error("normalization by 2n/eps requires eps > 0")]
    EpsilonRequired,
    #[error("point is not periodic with prime period {period} (|f^p(z) - z| = {residual:e})")]
    NotPeriodic { period: usize, residual: f64 },
    #[error("periodic orbit is not repelling (|det Df^p| = {det})")]
    NotRepelling { det: f64 },
    #[error("truncation too small: tail bound {tail:e} exceeds 10% of the bound {bound:e}")]
    TruncationTooSmall { tail: f64, bound: f64 },
    #[error("too few exceedances: {got} (need 50)")]
    TooFewExceedances { got: usize },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
