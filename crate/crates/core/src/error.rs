use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value violates its documented invariant.
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed or contract-violating input data.
    #[error("input error: {0}")]
    Input(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// `X^T y` carries no class signal, so the reference map has no direction.
    #[error("degenerate reference: {0}")]
    DegenerateReference(String),

    /// A weight vector was exactly zero where a direction was required.
    #[error("degenerate model: weight vector has zero norm")]
    DegenerateModel,

    #[error("perturbation error: {0}")]
    Perturbation(String),

    #[error("metric error: {0}")]
    Metric(String),

    #[error("selection error: {0}")]
    Selection(String),

    /// Wraps a lower-level error with the candidate (and replicate) that raised it.
    #[error("lambda = {lambda}{}: {source}", replicate.map(|r| format!(", replicate {r}")).unwrap_or_default())]
    Candidate {
        lambda: f64,
        replicate: Option<usize>,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_candidate(self, lambda: f64, replicate: Option<usize>) -> Self {
        Error::Candidate {
            lambda,
            replicate,
            source: Box::new(self),
        }
    }

    /// Strips candidate annotations to reach the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::Candidate { source, .. } => source.root(),
            other => other,
        }
    }
}
