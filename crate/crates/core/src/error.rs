use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvtError {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The inputs are individually valid but mutually inconsistent, e.g. a
    /// Weibull target for a parent with an infinite right endpoint.
    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),

    /// Adaptive quadrature ran out of subdivisions before reaching tolerance.
    #[error(
        "quadrature did not converge: estimate {estimate} with error estimate {error:e} \
         after {subdivisions} subdivisions"
    )]
    Quadrature {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    /// A root finder could not bracket or locate a root.
    #[error("root finding failed: {0}")]
    RootFinding(String),
}

impl EvtError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        EvtError::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, EvtError>;
