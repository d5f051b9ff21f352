use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("series must contain at least one sample")]
    EmptySeries,

    #[error("series contains a non-finite sample at index {0}")]
    NonFiniteSample(usize),

    #[error("series too short to difference (need at least 2 samples)")]
    SeriesTooShortToDifference,

    #[error("series too short: need at least {need} samples, got {got}")]
    SeriesTooShort { need: usize, got: usize },

    #[error("resample target length must be at least 2, got {0}")]
    ResampleTargetTooSmall(usize),

    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),

    #[error("alphabet exhausted: max_k {0} exceeds the 26-letter alphabet")]
    AlphabetExhausted(usize),

    #[error("max_k must be at least 1")]
    ZeroMaxK,

    #[error("symbol not in alphabet: {0:?}")]
    UnknownSymbol(char),

    #[error("symbolic representation has no patch dictionary")]
    MissingPatches,

    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("input window must contain at least one step")]
    EmptyWindow,

    #[error("lag too large for series: lag {lag} with {len} samples")]
    LagTooLarge { lag: usize, len: usize },

    #[error("series too short after compression: {symbols} symbols for lag {lag}")]
    StringTooShortForLag { symbols: usize, lag: usize },

    #[error("forecast horizon must be at least 1")]
    ZeroHorizon,

    #[error("forecast horizon {requested} does not match trained head of {head}")]
    HorizonMismatch { requested: usize, head: usize },

    #[error("checkpoint is malformed: {0}")]
    MalformedCheckpoint(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
