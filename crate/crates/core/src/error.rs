use std::path::PathBuf;

/// Errors produced anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("degenerate matrix: {0}")]
    DegenerateMatrix(String),

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("duplicate word `{0}`")]
    DuplicateWord(String),

    #[error("invalid value for `{word}`: {value}")]
    InvalidValue { word: String, value: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("label {label} for `{word}` is not -1 or +1")]
    LabelDomain { word: String, label: f64 },

    #[error("resource `{0}` is empty after filtering")]
    EmptyResource(String),

    #[error("vocabulary of {have} words is smaller than the required {need}")]
    InsufficientVocabulary { have: usize, need: usize },

    #[error("resource `{0}` shares no words with the embedding vocabulary")]
    EmptyIntersection(String),

    #[error("missing class: {0}")]
    MissingClass(String),

    #[error("subspaces overlap at dimension {0}")]
    OverlappingSubspaces(usize),

    #[error("unknown property `{0}`")]
    UnknownProperty(String),

    #[error("property `{0}` has a multi-dimensional subspace and needs a linear map")]
    NeedsLinearMap(String),

    #[error("correlation is undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("training aborted at iteration {iteration}: {source}")]
    TrainingAborted {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    /// The innermost error, looking through `TrainingAborted`.
    pub fn root(&self) -> &Error {
        match self {
            Error::TrainingAborted { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
