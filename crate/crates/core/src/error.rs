use alloc::string::String;

/// Errors produced by the simulation core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid usage: {0}")]
    Usage(String),

    #[error("operator is not hermitian (max deviation {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("negative dissipation rate {0}")]
    NegativeRate(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("steady state is not unique (estimated nullity {nullity})")]
    NonUniqueSteadyState { nullity: usize },

    #[error("steady-state residual {residual:e} exceeds tolerance {tolerance:e}")]
    NoConvergence { residual: f64, tolerance: f64 },

    #[error("not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("degenerate kernel: {0}")]
    DegenerateKernel(String),

    #[error("invalid partition: {0}")]
    Partition(String),
}

pub type Result<T> = core::result::Result<T, Error>;
