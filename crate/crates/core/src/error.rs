use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge {0}")]
    UnknownEdge(usize),
    #[error("offset {offset} out of range for edge of length {length}")]
    OffsetOutOfRange { offset: String, length: String },
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("operation requires a non-empty multiset")]
    EmptyMultiset,
    #[error("two distinct weighted medians are equally close to the tie-break point")]
    TieBreakViolation,
    #[error("metric is not a path graph")]
    NotAPath,
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("malformed rational `{0}`")]
    MalformedRational(String),
    #[error("malformed point `{0}`")]
    MalformedPoint(String),
    #[error("{path}: {message}")]
    Document { path: String, message: String },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("mechanism `{mechanism}` cannot run on this input: {reason}")]
    MechanismMismatch { mechanism: String, reason: String },
}

impl Error {
    /// Prefixes a document location onto an error raised while validating a field.
    pub(crate) fn at(self, path: impl Into<String>) -> Error {
        match self {
            Error::Document { .. } => self,
            other => Error::Document {
                path: path.into(),
                message: other.to_string(),
            },
        }
    }
}
