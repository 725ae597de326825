//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },

    #[error("{file}: {failed} of {total} lines failed to parse (more than 10%)")]
    TooManyParseErrors {
        file: String,
        failed: usize,
        total: usize,
    },

    #[error("no segment of the inventory matches at offset {offset} ({snippet:?})")]
    Tokenize { offset: usize, snippet: String },

    #[error("invalid UTF-8 at byte offset {offset}")]
    InvalidUtf8 { offset: usize },

    #[error("zero-frequency form: counts must be >= 1 after filtering")]
    ZeroFrequency,

    #[error("count {count} exceeds corpus total {total}")]
    CountExceedsTotal { count: u64, total: u64 },

    #[error("language {language:?} has no usable entries")]
    NoUsableEntries { language: String },

    #[error("cannot split {units} units into {k} folds")]
    BadFoldCount { units: usize, k: usize },

    #[error("duplicate unit id {id:?} in fold split")]
    DuplicateUnit { id: String },

    #[error("empty training set")]
    EmptyTrainingSet,

    #[error("segment {segment:?} is not in the model vocabulary")]
    OutOfVocabulary { segment: String },

    #[error("empty word")]
    EmptyWord,

    #[error("invalid segment {0:?}: must be non-empty and contain no whitespace")]
    InvalidSegment(String),

    #[error("probability {0} outside the open interval (0, 1)")]
    InvalidProbability(f64),

    #[error("p-value {0} outside [0, 1]")]
    InvalidPValue(f64),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("variable {name:?} has zero variance")]
    ZeroVariance { name: String },

    #[error("non-finite value in {0}")]
    NonFiniteInput(&'static str),

    #[error("design matrix is rank deficient; collinear columns: {columns:?}")]
    RankDeficient { columns: Vec<String> },

    #[error("{context}: need at least {needed} observations, got {got}")]
    TooFewObservations {
        context: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("mixed model needs at least 2 groups, got {0}")]
    TooFewGroups(usize),

    #[error("loess span must be in (0, 1], got {0}")]
    BadSpan(f64),

    #[error("form tables share no ids; nothing to join")]
    DisjointJoin,

    #[error("unknown column {0:?} in analysis table")]
    UnknownColumn(String),

    #[error("duplicate point label {0:?}")]
    DuplicateLabel(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("failed to parse config: {0}")]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
