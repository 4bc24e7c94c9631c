//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by state construction, evolution, and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be 2 or 4, got {0}")]
    BadDimension(usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("ket norm deviates from 1 by {0:.3e}")]
    NonUnitNorm(f64),

    #[error("matrix is not Hermitian: max |A - A†| = {0:.3e}")]
    NotHermitian(f64),

    #[error("trace deviates from 1 by {0:.3e}")]
    NotUnitTrace(f64),

    #[error("matrix has eigenvalue {0:.3e} below the positivity tolerance")]
    NotPositive(f64),

    #[error("fidelity denominator {0:.3e} is too small (traceless or zero input)")]
    DegenerateFidelity(f64),

    #[error("matrix is numerically singular (|det| = {0:.3e})")]
    SingularMatrix(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("conditioning on an event of probability {0:.3e}")]
    NullConditioning(f64),

    #[error("threshold undefined: sin(2 pi J t) = {0:.3e} is not positive")]
    ThresholdDomain(f64),

    #[error("time grids do not match")]
    GridMismatch,

    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("every sample falls below the coherence threshold")]
    AllSamplesSingular,

    #[error("channel samples do not cover the full operator basis")]
    IncompleteBasis,

    #[error("pulse spacing {spacing:.6e} s does not divide the inter-pulse interval {interval:.6e} s")]
    NonCommensurateSpacing { spacing: f64, interval: f64 },

    #[error("malformed schedule event: {0}")]
    MalformedEvent(String),

    #[error("internal consistency check failed: {0}")]
    InternalCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
