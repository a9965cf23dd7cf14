use thiserror::Error;

/// Errors surfaced by kernel evaluation, simulation and analysis routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A scalar argument is outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A time grid failed validation (not strictly increasing, negative times, ...).
    #[error("invalid time grid: {0}")]
    Grid(String),

    /// Adaptive quadrature ran out of panels before reaching the requested tolerance.
    #[error("quadrature did not converge: requested {requested:e}, achieved {achieved:e} after {panels} panels")]
    QuadratureNonConvergence {
        requested: f64,
        achieved: f64,
        panels: usize,
    },

    /// Cholesky factorization failed even after the full jitter schedule.
    #[error("factorization failed after jitter schedule (last jitter {last_jitter:e}): pivot {pivot:e} at index {index}")]
    FactorizationFailed {
        last_jitter: f64,
        pivot: f64,
        index: usize,
    },

    /// The symmetric eigensolver did not converge; condition diagnostics attached.
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    /// Sample covariance requires at least two paths.
    #[error("insufficient paths: need at least {needed}, got {got}")]
    InsufficientPaths { needed: usize, got: usize },

    /// Log-log regression input does not span enough decades or has too few points.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// Local-exponent window does not fit inside the sampled grid.
    #[error("window out of range: {0}")]
    WindowOutOfRange(String),

    /// Fewer than two dyadic scales were supplied.
    #[error("insufficient scales: need at least 2, got {0}")]
    InsufficientScales(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
