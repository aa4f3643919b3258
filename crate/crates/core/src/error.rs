use thiserror::Error;

/// Errors raised across the library.
///
/// Validation problems (bad parameters, points outside a strip, inadmissible
/// orders) are kept apart from numerical failures (quadrature or root-finding
/// that did not converge) so that callers can map them to different exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// One or more parameter constraints failed. Every violated constraint is listed.
    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    /// Argument outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature hit its subdivision cap.
    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    Quadrature { estimate: f64, error_bound: f64 },

    /// The root bracket does not contain a sign change.
    #[error("invalid bracket [{lo}, {hi}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    InvalidBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// Root finder hit its iteration cap.
    #[error("root finder did not converge after {iterations} iterations (last x = {last_x})")]
    RootNotConverged { iterations: usize, last_x: f64 },

    /// Requested functionality is not available for this model family.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(vec![msg.into()])
    }

    /// True for errors caused by bad inputs rather than numerical trouble.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Validation(_) | Error::Domain(_) | Error::Unsupported(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Collects constraint violations and turns them into a single error.
#[derive(Debug, Default)]
pub(crate) struct Violations(Vec<String>);

impl Violations {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.0.push(msg());
        }
    }

    pub(crate) fn finish(self) -> Result<()> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(self.0))
        }
    }
}
