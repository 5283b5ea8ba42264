use thiserror::Error;

use crate::congruence::WaveletSetFailure;

/// Malformed textual or JSON input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("cannot parse scalar {0:?} (expected a rational or a rational multiple of pi)")]
    Scalar(String),
    #[error("cannot parse interval set {0:?}: {1}")]
    Set(String, String),
    #[error("cannot parse coefficient: {0}")]
    Coefficient(String),
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("not a wavelet set: {0}")]
    NotWaveletSet(Box<WaveletSetFailure>),

    #[error("dilation factors differ ({0} vs {1})")]
    FactorMismatch(String, String),

    #[error("ring splitting did not terminate for {0} (set accumulates at 0 or infinity)")]
    UnboundedSplit(String),

    #[error("{what} exceeded the cap of {cap} pieces")]
    PieceLimit { what: &'static str, cap: usize },

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("pieces do not partition the fundamental domain: {0}")]
    NotAPartition(String),

    #[error("coefficient criterion failed: {0}")]
    CriterionFailed(String),

    #[error("test function support {0} exceeds the coverable range")]
    SupportOutOfRange(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
