use crate::approximations::ApproximationId;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument was outside the domain a routine is defined on.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Power iteration did not reach the Rayleigh-quotient tolerance.
    #[error(
        "power iteration did not converge after {iterations} iterations \
         (last Rayleigh delta {last_delta:.3e}, last eigenvalue {last_value:.12})"
    )]
    PowerIterationDiverged {
        iterations: usize,
        last_delta: f64,
        last_value: f64,
    },

    /// A Monte Carlo ratio estimator had an empty denominator.
    #[error(
        "degenerate Monte Carlo ratio: no surviving paths at horizon T={horizon}; \
         increase reps (had {reps})"
    )]
    DegenerateRatio { horizon: f64, reps: u64 },

    /// An expensive computation was requested without opting in.
    #[error("{0} is gated behind the expensive flag; enable Tuning::allow_expensive")]
    ExpensiveGated(&'static str),

    /// A failure inside an approximation, tagged with the approximation id.
    #[error("approximation {id} at h={h}: {source}")]
    Approximation {
        id: ApproximationId,
        h: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn tag(self, id: ApproximationId, h: f64) -> Self {
        Error::Approximation {
            id,
            h,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
