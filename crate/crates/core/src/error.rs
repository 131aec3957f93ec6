use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Grid/config inconsistencies (bad dimension, cutoff, aliasing-unsafe grids).
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Wrong kind of field for an operation (e.g. projecting a scalar).
    #[error("type error: {0}")]
    Type(String),

    #[error("floating-point overflow in exponential weight at |k| = {k_norm}")]
    Overflow { k_norm: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("analyticity radius exhausted at s = {s} (beta0/delta = {limit})")]
    RadiusExhausted { s: f64, limit: f64 },

    /// A model-state invariant does not hold.
    #[error("state error: {0}")]
    State(String),

    #[error("radius-of-convergence error: {0}")]
    ConvergenceRadius(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown initial data '{0}'")]
    UnknownData(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
