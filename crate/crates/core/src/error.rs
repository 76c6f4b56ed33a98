use thiserror::Error;

/// Errors raised by instance construction, reductions, solvers and samplers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Structurally invalid input (bad index, wrong length, negative weight...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A bias that cannot be met (exactly-mode weight not realizable, μ out of range).
    #[error("infeasible bias: {0}")]
    InfeasibleBias(String),

    /// An exhaustive search or expansion would exceed its configured cap.
    #[error("size cap exceeded: {what} needs {needed}, cap is {cap}")]
    CapExceeded { what: String, needed: u64, cap: u64 },

    /// A precondition of an algorithm does not hold for this input.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Degenerate input that leaves the requested quantity undefined.
    #[error("degenerate instance: {0}")]
    Degenerate(String),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::InfeasibleBias(_) => "infeasible_bias",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::Precondition(_) => "precondition",
            Error::Degenerate(_) => "degenerate",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
