use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input arity {given} does not match network input width {expected}")]
    ShapeMismatch { expected: usize, given: usize },

    #[error("layer specification contains a zero-width layer")]
    ZeroWidthLayer,

    #[error("non-finite value {value} at {context}")]
    NonFinite { context: String, value: f64 },

    #[error("empty grid")]
    EmptyGrid,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("training diverged at iteration {iter}: loss = {loss}")]
    Diverged { iter: usize, loss: f64 },

    #[error("ODE integrator failed: {0}")]
    Integrator(String),

    #[error("finite difference step violates the stability bound: max|u|*dt/dx = {cfl}")]
    Unstable { cfl: f64 },

    #[error("zero weight at grid index {index} where the integrating factor is positive")]
    ZeroWeight { index: usize },

    #[error("{0}")]
    Unsupported(String),

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn non_finite(context: impl Into<String>, value: f64) -> Self {
        Error::NonFinite {
            context: context.into(),
            value,
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
