use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes shared by all solvers.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("pole of the gamma function at {0}")]
    Pole(f64),
    #[error("degenerate orbit: {0}")]
    DegenerateOrbit(String),
    #[error("singular model: {0}")]
    SingularModel(String),
    #[error("accuracy target not reached: {what} (achieved {achieved:e})")]
    Accuracy { what: String, achieved: f64 },
    #[error("ill-conditioned eigenproblem (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("no invariant probability measure: {0}")]
    NoInvariantMeasure(String),
    #[error("step size collapse at s = {0}")]
    Stiffness(f64),
    #[error("reduction of order breaks down at index {0}")]
    Breakdown(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("heavy-tailed weights: largest share {max_share:.3} of the total")]
    HeavyTail { max_share: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn accuracy(what: impl Into<String>, achieved: f64) -> Self {
        Error::Accuracy {
            what: what.into(),
            achieved,
        }
    }
}
