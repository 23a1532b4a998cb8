//! Crate-wide error type.

use thiserror::Error;

/// Broad failure categories, used by callers (e.g. the CLI) to map errors
/// onto exit codes without matching every variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad arguments or configuration.
    Parameter,
    /// Hash or seal verification failed.
    Integrity,
    /// Failure talking to a model endpoint.
    Transport,
    /// Filesystem or encoding failure.
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read input file {path}: {reason}")]
    UnreadableInput { path: String, reason: String },

    #[error("no records ingested: input is empty")]
    EmptyCorpus,

    #[error("unknown document id {0:#018x}")]
    UnknownDocument(u64),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("corpus too small to sample {requested} distinct prompts")]
    CorpusTooSmall { requested: usize },

    #[error("poison budget exceeded: insertion needs {required} bytes, budget allows {allowed}")]
    PoisonBudgetExceeded { required: u64, allowed: u64 },

    #[error("sealed blob integrity check failed: {0}")]
    SealIntegrity(String),

    #[error("transcript is malformed: {0}")]
    MalformedTranscript(String),

    #[error("model query failed: {0}")]
    ModelTransport(String),

    #[error("attestation refused: transcript verdict is {verdict}")]
    AttestationRefused { verdict: String },

    #[error("ledger validation failed: {0}")]
    LedgerValidation(String),

    #[error("certification refused: {0}")]
    CertificationRefused(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::UnreadableInput { .. } | Error::Io { .. } => ErrorKind::Io,
            Error::SealIntegrity(_) | Error::MalformedTranscript(_) => ErrorKind::Integrity,
            Error::ModelTransport(_) => ErrorKind::Transport,
            Error::Serde(_) => ErrorKind::Io,
            _ => ErrorKind::Parameter,
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
