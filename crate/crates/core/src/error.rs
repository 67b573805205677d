use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Bloch vector: length {length} exceeds 1")]
    InvalidBloch { length: f64 },

    #[error("invalid observable direction: length {length} is not 1")]
    InvalidObservable { length: f64 },

    #[error("a pure preparation is required: Bloch length {length} is below 1")]
    PureStateRequired { length: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid detector configuration: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("initial coherence is zero; the photon was prepared in an analyzer eigenstate")]
    NoCoherence,

    #[error("selector matched no pairs in the plan")]
    EmptySubsequence,

    #[error("plan uses more than one observable direction")]
    SingleObservableRequired,

    #[error("parameter `{name}` out of range: {message}")]
    OutOfRange { name: String, message: String },

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("config field `{field}`: {message}")]
    ConfigField { field: String, message: String },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn out_of_range(name: &str, message: impl Into<String>) -> Self {
        Error::OutOfRange {
            name: name.to_string(),
            message: message.into(),
        }
    }

    pub(crate) fn field(field: &str, message: impl Into<String>) -> Self {
        Error::ConfigField {
            field: field.to_string(),
            message: message.into(),
        }
    }

    pub(crate) fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
