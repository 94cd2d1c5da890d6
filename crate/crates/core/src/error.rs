use thiserror::Error;

/// Errors raised by the simulator, the closed-form theory and the estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point pattern is empty")]
    EmptyPattern,

    #[error("observer index {index} out of range for a pattern of {len} points")]
    InvalidObserver { index: usize, len: usize },

    #[error("duplicate observer index {0}")]
    DuplicateObserver(usize),

    /// A closed form was evaluated outside the parameter region where it converges.
    #[error("divergent expression: {0}")]
    Divergent(String),

    #[error("outside the domain of the closed form: {0}")]
    Domain(String),

    #[error("measurement lacks per-transmitter detail")]
    MissingDetail,

    #[error("mean received power {mean} does not exceed the noise floor {noise}")]
    NoInterference { mean: f64, noise: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("inconsistent data: {0}")]
    InconsistentData(String),

    #[error("fading inversion is invalid (denominator {0})")]
    InvalidFadingEstimate(f64),

    #[error("empty input")]
    EmptyInput,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
