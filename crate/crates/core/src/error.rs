use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("arm index {arm} out of range for {arms} arms")]
    ArmOutOfRange { arm: usize, arms: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A quantity scaled by the certification gap was requested on an
    /// instance whose gap is zero.
    #[error("certification gap is zero; g-scaled quantities are undefined")]
    UndefinedScale,

    #[error("kl({p}, {q}) is infinite")]
    InfiniteDivergence { p: f64, q: f64 },

    #[error("contract violation: {0}")]
    Contract(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
