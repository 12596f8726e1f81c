use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid dataset: {0}")]
    Validation(String),

    /// The iterative solver hit its cap. `best` is the last iterate and
    /// `gap` its certified suboptimality.
    #[error("no convergence after {iterations} iterations (gap {gap:e})")]
    NonConvergence {
        iterations: usize,
        gap: f64,
        best: Vec<f64>,
    },

    #[error("ill-conditioned ellipsoid: {0}")]
    Conditioning(String),

    #[error("instance exceeds reference limits: {0}")]
    SizeLimit(String),

    /// The classifier has no usable direction (zero margin).
    #[error("undefined classifier: {0}")]
    UndefinedClassifier(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
