use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("residue {j} out of range 0..{m}")]
    InvalidResidue { j: i64, m: u64 },

    #[error("invalid multi-index: {0}")]
    InvalidIndex(String),

    #[error("gamma is rational; an irrational value is required")]
    NotIrrational,

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("empty window: {0}")]
    EmptyWindow(String),

    #[error("multi-index ({a1},{a2}) is not allowable")]
    NotAllowable { a1: i64, a2: i64 },

    #[error("too close to the singular set: |{factor}| = {magnitude:e}")]
    NearSingular { factor: &'static str, magnitude: f64 },

    #[error("point not in domain: {0}")]
    NotInDomain(String),

    #[error("series did not converge after {terms} terms (tail bound {tail_bound:e})")]
    NotConverged { terms: u64, tail_bound: f64 },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("inner radial integral diverges (a = {0})")]
    InnerDivergent(f64),

    #[error("unreliable estimate: {0}")]
    UnreliableEstimate(String),

    #[error("no witness found within {0} convergents")]
    NotFound(usize),

    #[error("quadrature failed: achieved error estimate {estimate:e}")]
    QuadratureError { estimate: f64 },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}

impl Error {
    /// Short machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidExponent(_) => "InvalidExponent",
            Error::InvalidResidue { .. } => "InvalidResidue",
            Error::InvalidIndex(_) => "InvalidIndex",
            Error::NotIrrational => "NotIrrational",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::EmptyWindow(_) => "EmptyWindow",
            Error::NotAllowable { .. } => "NotAllowable",
            Error::NearSingular { .. } => "NearSingular",
            Error::NotInDomain(_) => "NotInDomain",
            Error::NotConverged { .. } => "NotConverged",
            Error::OutOfRange(_) => "OutOfRange",
            Error::InnerDivergent(_) => "InnerDivergent",
            Error::UnreliableEstimate(_) => "UnreliableEstimate",
            Error::NotFound(_) => "NotFound",
            Error::QuadratureError { .. } => "QuadratureError",
            Error::Overflow(_) => "Overflow",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
