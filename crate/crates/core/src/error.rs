use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// An invariant of a domain type does not hold.
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    #[error("basis is not orthonormal at pair ({0}, {1})")]
    NonOrthonormal(usize, usize),

    #[error("decoder labels do not match the alphabet: missing {missing:?}, extra {extra:?}")]
    LabelMismatch { missing: Vec<String>, extra: Vec<String> },

    #[error("unambiguity violated: symbol {sent} is decoded as {decoded} with probability {probability:e}")]
    Unambiguity { sent: String, decoded: String, probability: f64 },

    #[error("out of domain: {0}")]
    OutOfDomain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("conversion failed at index {index}: {reason}")]
    Conversion { index: usize, reason: String },

    #[error("unknown party {0:?}")]
    UnknownParty(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid { what, reason: reason.into() }
    }

    /// True for errors caused by input that violates a stated invariant.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::Invalid { .. }
                | Error::NonOrthonormal(..)
                | Error::LabelMismatch { .. }
                | Error::Unambiguity { .. }
                | Error::Parse(_)
                | Error::Json(_)
                | Error::UnknownParty(_)
        )
    }
}
