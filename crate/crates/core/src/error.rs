use thiserror::Error;

/// Errors raised by the computation engine.
///
/// `Indeterminate` is the honest failure mode of the numerics: a quadrature
/// that neither converged nor produced a divergence certificate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid Orlicz function: {0}")]
    InvalidPhi(String),

    #[error("{what} mismatch: declared {declared}, detected {detected}")]
    ParamMismatch {
        what: &'static str,
        declared: f64,
        detected: f64,
    },

    #[error("declared flag `{flag}` = {declared} contradicts the sampled verdict")]
    FlagMismatch { flag: &'static str, declared: bool },

    #[error("invalid step function: {0}")]
    InvalidStep(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("indeterminate integral on [{lo:e}, {hi:e}] after {subdivisions} subdivisions")]
    Indeterminate {
        lo: f64,
        hi: f64,
        subdivisions: usize,
    },

    #[error("φ({0:e}) overflowed below b_φ")]
    Overflow(f64),

    #[error("root not bracketed: {0}")]
    RootNotBracketed(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
