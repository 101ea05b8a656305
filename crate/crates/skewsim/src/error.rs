//! Crate-wide error type.
//!
//! Every fallible operation in the crate returns [`Error`]. Variants are
//! grouped by the stage that raises them: parameter validation, numerical
//! evaluation, sampling, and I/O.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by skewsim operations.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter failed validation (domain constraints, admissibility of the
    /// shift, ordering of barriers, and so on).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A combinatorial table index exceeded the supported range.
    #[error("combinatorial index {index} exceeds the supported maximum {max}")]
    CombinatorialOverflow { index: usize, max: usize },

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    /// A series evaluation failed to reach the requested tolerance within the
    /// term cap.
    #[error("series truncation: remainder bound {remainder:.3e} above tolerance {tol:.3e} after {n_terms} terms")]
    SeriesNotConverged {
        remainder: f64,
        tol: f64,
        n_terms: usize,
    },

    /// The rejection sampler exhausted its proposal budget.
    #[error("rejection sampler exceeded the proposal cap of {cap}")]
    ProposalCapExceeded { cap: u64 },

    /// The whole-path sampler exhausted its restart budget.
    #[error("path sampler exceeded the restart cap of {cap}")]
    RestartCapExceeded { cap: u64 },

    /// A requested time lies outside the span of the skeleton it refines.
    #[error("time {t} lies outside the skeleton span [{lo}, {hi}]")]
    TimeOutsideSpan { t: f64, lo: f64, hi: f64 },

    /// The bridge normalisation constant is numerically indistinguishable
    /// from zero, so conditioning on the endpoint is ill-posed.
    #[error("bridge denominator v({t_total}, {x1}, {x2}) = {value:.3e} is below 1e-12")]
    DegenerateBridge {
        t_total: f64,
        x1: f64,
        x2: f64,
        value: f64,
    },

    /// A drift configuration file could not be parsed.
    #[error("drift configuration: {0}")]
    DriftConfig(String),

    /// An empty or non-finite sample batch was supplied to analysis code.
    #[error("invalid sample batch: {0}")]
    InvalidBatch(String),

    /// Underlying I/O failure while reading or writing artefacts.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// CSV serialisation failure.
    #[error(transparent)]
    Csv(#[from] csv::Error),

    /// JSON serialisation failure.
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
