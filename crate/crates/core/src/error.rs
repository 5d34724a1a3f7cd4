use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("feature index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("empty data set")]
    EmptyData,

    #[error("feature {index} has no finite support; exact expectations need discrete features")]
    NotFinitelySupported { index: usize },

    #[error("support size {size} exceeds the cap of {cap} atoms")]
    SupportTooLarge { size: f64, cap: usize },

    #[error("weight vector is zero")]
    ZeroWeights,

    #[error("solver stopped after {iterations} passes with duality gap {achieved_gap:e} (tolerance {tolerance:e})")]
    NotConverged {
        iterations: usize,
        achieved_gap: f64,
        tolerance: f64,
    },

    #[error("exact enumeration over {dim} coordinates is too large (limit {limit})")]
    EnumerationTooLarge { dim: usize, limit: usize },

    #[error("malformed input at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
