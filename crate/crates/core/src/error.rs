use thiserror::Error;

/// Errors produced by the numerical kernels.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Jet operands have different truncation orders.
    #[error("jet order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    /// Reciprocal of a jet whose constant term vanishes.
    #[error("reciprocal of a jet with zero constant term")]
    SingularJet,

    /// The Bessel zero finder could not isolate a sign change.
    #[error("zero finder failed for nu = {nu}, zero #{index}: {detail}")]
    ZeroFinding { nu: f64, index: usize, detail: String },

    /// Adaptive quadrature stopped refining before reaching the tolerance.
    #[error("quadrature did not converge: achieved {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    /// The truncated mode sum of the flat-output derivative stack cannot be
    /// certified at the requested order; more modes are needed.
    #[error(
        "flat-output tail at derivative order {order} is {tail:e} against scale {scale:e}; \
         increase the mode count"
    )]
    SpectralTail { order: usize, tail: f64, scale: f64 },

    /// A time grid does not satisfy the contract of the operation.
    #[error("time grid: {0}")]
    Grid(String),

    /// A non-finite value appeared where a finite one is required.
    #[error("non-finite value in {0}")]
    NonFinite(String),

    /// Initial-datum specification could not be parsed or used.
    #[error("initial datum: {0}")]
    InitialDatum(String),

    /// Underlying I/O failure (CSV ingestion, artifact export).
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
