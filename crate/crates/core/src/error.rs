use thiserror::Error;

/// Errors raised by the numeric routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    /// The result is not representable as a finite double.
    #[error("overflow in {func} at x = {x}")]
    Overflow { func: &'static str, x: f64 },

    /// The endpoints of a root bracket do not straddle a sign change.
    #[error("invalid bracket [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    InvalidBracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// An iterative method exhausted its budget.
    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    /// A least-squares problem whose basis cannot be resolved.
    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),

    /// Rejected tolerance settings.
    #[error("invalid tolerances: {0}")]
    InvalidTolerances(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }
}
