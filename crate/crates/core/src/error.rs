use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {index} is outside the defined horizon {horizon}")]
    IndexOutOfRange { index: usize, horizon: usize },

    #[error("asymptotic bounds are unavailable for a finite coefficient list without a tail law")]
    AsymptoticsUnavailable,

    #[error("coefficient at position {position} is zero")]
    ZeroCoefficient { position: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("seminorm index {index} out of range for a family of size {size}")]
    SeminormIndex { index: usize, size: usize },

    #[error("unsupported field: {0}")]
    UnsupportedField(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("scale factor must be nonnegative, got {0}")]
    NegativeScale(f64),

    #[error("sampler {sampler} cannot draw from a {set} set")]
    IncompatibleSampler { sampler: &'static str, set: &'static str },

    #[error("horizon {available} is too short to reach tolerance {tolerance:e}; about {needed} defects are required")]
    HorizonInsufficient { available: usize, needed: usize, tolerance: f64 },

    #[error("regime is {found}, but {required} is required")]
    WrongRegime { required: &'static str, found: &'static str },
}
