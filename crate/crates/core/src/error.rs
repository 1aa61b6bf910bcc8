use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no convergence after {evaluations} evaluations (value {value}, error estimate {error_estimate})")]
    NonConvergence {
        value: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    #[error("Fock truncation at dim {dim} leaves tail mass {tail_mass:e}")]
    Truncation { dim: usize, tail_mass: f64 },

    #[error("no bound state: {0}")]
    BoundState(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Whether the innermost error is a numerical failure rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self.root(), Error::NonConvergence { .. } | Error::Truncation { .. })
    }

    /// The innermost error, skipping any context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }
}
