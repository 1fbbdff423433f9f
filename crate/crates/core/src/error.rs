use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, IvaError>;

#[derive(Debug, Error)]
pub enum IvaError {
    /// A configuration value violates its contract (transform size, beamwidth, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A named config field failed validation.
    #[error("invalid value for `{field}`: {reason}")]
    InvalidField { field: String, reason: String },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// Non-finite or otherwise malformed numeric data.
    #[error("data error: {0}")]
    Data(String),

    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("invalid sensing repetition interval: {0}")]
    InvalidSri(String),

    #[error("degenerate sensing band: K_s = {0} < 8")]
    DegenerateBand(usize),

    #[error("beam synthesis failed: {0}")]
    Synthesis(String),

    #[error("cross-correlation undefined: symbol {0} has an all-zero profile")]
    UndefinedCorrelation(usize),

    #[error("reference cell selection failed: {0}")]
    Selection(String),

    #[error("phase undefined: zero magnitude at cell {cell}, symbol {symbol}")]
    PhaseUndefined { cell: usize, symbol: usize },

    #[error("cross-range undefined: target has no apparent rotation")]
    UndefinedCrossRange,

    #[error("image contrast undefined: crop mean is zero")]
    UndefinedContrast,

    #[error("threshold undefined: image is all zero")]
    Threshold,

    #[error("no detection: thresholded image has empty support")]
    NoDetection,

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("trial {trial}: {source}")]
    Trial {
        trial: u64,
        #[source]
        source: Box<IvaError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl IvaError {
    pub(crate) fn field(field: &str, reason: impl Into<String>) -> Self {
        IvaError::InvalidField {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}
