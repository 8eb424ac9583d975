//! Error type shared across the toolkit.

use crate::corpus::Label;

/// Errors produced by any stage of the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("english-like emoji replacement requires an emoji map")]
    MissingEmojiMap,
    #[error("document {0:?} is empty after preprocessing")]
    EmptyAfterPreprocess(String),
    #[error("duplicate vocabulary token {token:?} (line {line})")]
    DuplicateToken { token: String, line: usize },
    #[error("vocabulary is missing special token {0}")]
    MissingSpecialToken(&'static str),
    #[error("no tokens survive encoding")]
    EmptyInput,
    #[error("corpus has no {0} documents")]
    MissingClass(Label),
    #[error("malformed score file: {0}")]
    MalformedScoreFile(String),
    #[error("invalid threshold grid: {0}")]
    InvalidGrid(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("lexicon is empty")]
    EmptyLexicon,
    #[error("length mismatch: {preds} predictions vs {golds} gold labels")]
    LengthMismatch { preds: usize, golds: usize },
    #[error("empty evaluation input")]
    EmptyEval,
    #[error("class {label} has {count} documents but k = {k}")]
    TooFewPerClass { label: Label, count: usize, k: usize },
    #[error("unknown mask strategy {0:?}")]
    UnknownStrategy(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed record: {0}")]
    MalformedRecord(String),
    #[error("malformed model file: {0}")]
    MalformedModelFile(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
