use thiserror::Error;

/// Errors produced by the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed instance, allocation or argument.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The input is well formed but outside the domain a solver handles,
    /// e.g. a zero leader entry passed to the follower's best response.
    #[error("unsupported input: {0}")]
    Unsupported(String),

    /// A structural precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An oracle grid would evaluate more points than its cap allows.
    #[error("grid needs {required} points but the cap is {cap}; raise the point cap to at least {required}")]
    GridOverflow { required: u128, cap: u64 },

    /// A solver produced a result that fails its own post-conditions.
    #[error("solver invariant failed: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
