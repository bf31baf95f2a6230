//! Error type shared by the whole crate.

use thiserror::Error;

/// Errors reported by the library.
///
/// `Parameter` covers violated preconditions (the message names the failed
/// inequality verbatim), `Convergence` covers series evaluations that hit the
/// iteration cap, and `Truncation` covers kernel truncation requests that
/// cannot be met near the boundary.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A parameter inequality or structural precondition failed.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A series evaluation did not converge within the term cap.
    #[error("convergence error: {0}")]
    Convergence(String),

    /// Tolerance-mode kernel truncation is infeasible for the given points.
    #[error("truncation infeasible: tail tolerance {tolerance:e} needs degree {required_degree} (cap {cap})")]
    Truncation {
        /// Degree the tail bound asks for.
        required_degree: usize,
        /// Largest degree the coefficient machinery supports.
        cap: usize,
        /// Requested tail tolerance.
        tolerance: f64,
    },

    /// Coefficient quadrature beyond the supported degree.
    #[error("unsupported degree: {0} exceeds the coefficient cap of 512")]
    UnsupportedDegree(usize),

    /// A finite-difference stencil or evaluation point left the ball.
    #[error("domain error: {0}")]
    Domain(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code convention used by the CLI: 2 for parameter errors,
    /// 3 for convergence/truncation failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) | Error::Domain(_) | Error::UnsupportedDegree(_) => 2,
            Error::Convergence(_) | Error::Truncation { .. } => 3,
        }
    }
}
