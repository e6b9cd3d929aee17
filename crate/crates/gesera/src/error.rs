//! Crate-wide error type.

/// Convenience alias used by every fallible operation in this crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// A malformed line in a line-oriented input file.
    #[error("{path}: line {line}: {message}")]
    Record {
        path: String,
        line: usize,
        message: String,
    },

    /// A file-level problem that is not tied to a single line.
    #[error("{path}: {message}")]
    File { path: String, message: String },

    #[error("duplicate document id {id:?}")]
    DuplicateDocId { id: String },

    #[error("requested subset of {requested} documents but the collection has only {available}")]
    SubsetTooLarge { requested: usize, available: usize },

    #[error("collection contains no documents")]
    EmptyCollection,

    #[error("collection contains no tokens")]
    NoTokens,

    #[error("unknown tag label {label:?}")]
    UnknownTagLabel { label: String },

    #[error("pre-tagged token {token:?} has no /TAG separator")]
    PretaggedToken { token: String },

    #[error("unknown document id {id:?}")]
    UnknownDocId { id: String },

    #[error("invalid ranked list: {0}")]
    RankedList(String),

    #[error("invalid index parameters: {0}")]
    IndexParams(String),

    #[error("{path}: not a recognized index file: {message}")]
    IndexFormat { path: String, message: String },

    #[error("{path}: index format version {found} is not supported (expected {expected})")]
    IndexVersion {
        path: String,
        found: u32,
        expected: u32,
    },

    #[error("no reference summaries supplied")]
    NoReferences,

    #[error("reference topic {found:?} does not match candidate topic {expected:?}")]
    TopicMismatch { expected: String, found: String },

    #[error("summary (topic {topic:?}, system {system:?}) is not a {expected} record")]
    WrongKind {
        topic: String,
        system: String,
        expected: &'static str,
    },

    #[error("candidate topics have no reference summaries: {}", topics.join(", "))]
    TopicsWithoutReferences { topics: Vec<String> },

    #[error("no rows found for metric {metric:?}")]
    MetricNotFound { metric: String },

    #[error("input vectors have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("need at least two observations, got {0}")]
    TooShort(usize),

    #[error("{0} vector has zero variance")]
    ZeroVariance(&'static str),

    #[error("all pairs are tied in the {0} vector")]
    AllTied(&'static str),

    #[error("score vectors share fewer than two system ids (left: [{}]; right: [{}])", left.join(", "), right.join(", "))]
    InsufficientOverlap {
        left: Vec<String>,
        right: Vec<String>,
    },

    #[error("unknown annotator id {id:?}")]
    UnknownAnnotator { id: String },

    #[error("invalid config:\n{}", problems.iter().map(|p| format!("  - {p}")).collect::<Vec<_>>().join("\n"))]
    Config { problems: Vec<String> },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Returns an [`Error::Io`] carrying the offending path.
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Returns an [`Error::Record`] for a malformed line.
    pub fn record(path: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Record {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// Wraps `self` with a short description of what was being attempted.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}
