use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dialogue `{dialogue}` turn {turn}: {message}")]
    Ingest {
        dialogue: String,
        turn: usize,
        message: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("label `{0}` contains no tokens")]
    EmptyLabel(String),

    #[error("unknown template `{0}`")]
    UnknownTemplate(String),

    #[error("text has no features to embed")]
    ZeroVector,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("empty text")]
    EmptyText,

    #[error("training set contains a single class")]
    SingleClass,

    #[error("gradient check failed: coordinate {coordinate} analytic={analytic:e} numeric={numeric:e} deviation={deviation:e}")]
    GradientCheck {
        coordinate: usize,
        analytic: f64,
        numeric: f64,
        deviation: f64,
    },

    #[error("external scorer protocol: {0}")]
    Protocol(String),

    #[error("no text for intent `{0}`")]
    MissingIntentText(String),

    #[error("unknown intent `{0}`")]
    UnknownIntent(String),

    #[error("unknown utterance `{0}`")]
    UnknownUtterance(String),

    #[error("length mismatch: {gold} gold vs {pred} predicted")]
    LengthMismatch { gold: usize, pred: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("unknown paraphrase family `{0}`")]
    UnknownFamily(String),

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("unsupported model file version {0}")]
    Version(u32),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
