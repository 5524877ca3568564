use thiserror::Error;

use crate::mt_engine::MtStats;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidSpec(String),

    #[error("k = {k} outside the admissible range 1..={max}")]
    KOutOfRange { k: usize, max: usize },

    #[error("internal consistency failure: {0} is not an exact integer")]
    InexactDivision(String),

    #[error("degenerate case n < 2w (n = {n}, w = {w}): the stationary point is not attained")]
    Degenerate { n: usize, w: usize },

    #[error("quantity undefined when n = w (n = {n})")]
    NoOuterColumns { n: usize },

    #[error("alphabet too small: no injective row of {w} symbols from an alphabet of {m}")]
    AlphabetTooSmall { m: u64, w: usize },

    #[error("no single row can separate the parts (m = {m} colours, q = 1)")]
    NoSeparatingRow { m: u64 },

    #[error("every row separates trivially (q = 0)")]
    AlwaysSeparating,

    #[error("operation requires exactly {expected} parts, got {got}")]
    PartCount { expected: usize, got: usize },

    #[error("instance too large for brute-force enumeration: {0}")]
    InstanceTooLarge(String),

    #[error("resample limit of {limit} exceeded after {} resamples", stats.resamples)]
    ResampleLimit { limit: u64, stats: Box<MtStats> },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
