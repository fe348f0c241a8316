use thiserror::Error;

pub type Result<T> = std::result::Result<T, CsError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CsError {
    #[error("frequency bin {bin} out of range for length {n_len}")]
    BinOutOfRange { bin: usize, n_len: usize },

    #[error("duplicate frequency bin {0}")]
    DuplicateBin(usize),

    #[error("invalid amplitude {0}: must be finite and nonnegative")]
    InvalidAmplitude(f64),

    #[error("signal length must be positive")]
    EmptySignal,

    #[error("cannot draw {m} measurements from a signal of length {n_len}")]
    TooManyMeasurements { m: usize, n_len: usize },

    #[error("invalid measurement set: {0}")]
    InvalidMeasurements(String),

    #[error("need at least {needed} measurements, got {got}")]
    NotEnoughMeasurements { needed: usize, got: usize },

    #[error("invalid noise scale {0}: must be finite and positive")]
    InvalidNoiseScale(f64),

    #[error("invalid norm exponent {0}: must be finite and >= 1")]
    InvalidNorm(f64),

    #[error("invalid threshold factor {0}: must lie in (0, 1]")]
    InvalidAlpha(f64),

    #[error("empty GD profile")]
    EmptyProfile,

    #[error("empty support set")]
    EmptySupport,

    #[error("support of size {support} exceeds the {m} available measurements")]
    OversizedSupport { support: usize, m: usize },

    #[error("rank-deficient system (condition estimate {condition:.3e}): bins {bins:?} are linearly dependent")]
    RankDeficient { condition: f64, bins: Vec<usize> },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),

    #[error("config line {line}, field `{field}`: {message}")]
    ConfigParse {
        line: usize,
        field: String,
        message: String,
    },

    #[error("reconstruction failed for every norm")]
    AllNormsFailed,

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for CsError {
    fn from(err: std::io::Error) -> Self {
        CsError::Io(err.to_string())
    }
}

impl From<csv::Error> for CsError {
    fn from(err: csv::Error) -> Self {
        CsError::Io(err.to_string())
    }
}
