use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A chaotic state left the open interval (0, 1).
    #[error("logistic orbit degenerated at step {step}: state {value}")]
    DegenerateOrbit { step: u64, value: f64 },

    #[error("invalid secret key: {0}")]
    InvalidKey(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("invalid table: {0}")]
    InvalidPermutation(String),

    #[error("invalid difference {0}: must be nonzero and not 128 modulo 256")]
    InvalidDifference(i32),

    /// The difference progression matched zero or several channels at step `step`.
    #[error("ambiguous channel at step {step}: candidates {candidates:?}")]
    AmbiguousChannel { step: usize, candidates: Vec<u8> },

    #[error("decoded position map is not a bijection: {0}")]
    NotABijection(String),

    #[error("malformed PPM header: {0}")]
    MalformedHeader(String),

    #[error("unsupported PPM maxval {0}, only 255 is accepted")]
    UnsupportedMaxval(u64),

    #[error("truncated PPM payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },

    #[error("{0} unexpected bytes after PPM payload")]
    TrailingBytes(usize),
}

impl Error {
    pub(crate) fn dims(expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
