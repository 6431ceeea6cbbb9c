use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameters or grids violate a precondition.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge: error estimate {estimate:e} > tolerance {tolerance:e} after {intervals} intervals")]
    NonConvergence {
        estimate: f64,
        tolerance: f64,
        intervals: usize,
    },

    /// A tangential (double) root or an unexpected root count.
    #[error("degenerate root structure: {0}")]
    Degenerate(String),

    /// The requested construction is not available in this stability regime.
    #[error("unsupported regime: {0}")]
    RefusedRegime(String),

    /// A grid is too coarse for the requested content.
    #[error("insufficient resolution: {0}")]
    Resolution(String),

    /// Too few oscillation peaks inside a fit window.
    #[error("found {found} peaks in the fit window, need at least {required}")]
    InsufficientPeaks { found: usize, required: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
