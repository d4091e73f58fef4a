use std::path::PathBuf;

use thiserror::Error;

use crate::types::Policy;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("{0} requires a finite capacity")]
    BoundedWithoutCapacity(Policy),
    #[error("{0} does not take a finite capacity")]
    UnboundedWithCapacity(Policy),
    #[error("capacity must be at least 1")]
    ZeroCapacity,
    #[error("U-MEM* cannot be evaluated with singletons kept")]
    StarWithSingletons,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: unbalanced coreference bracket for id {id}")]
    UnbalancedBracket { line: usize, id: u32 },
    #[error("line {line}: malformed column: {message}")]
    MalformedColumn { line: usize, message: String },
    #[error("line {line}: schema error at key `{key}`")]
    Schema { line: usize, key: String },
    #[error("{}:{source}", path.display())]
    File {
        path: PathBuf,
        #[source]
        source: Box<IngestError>,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl IngestError {
    /// Line number the error refers to, when it has one.
    pub fn line(&self) -> Option<usize> {
        match self {
            IngestError::UnbalancedBracket { line, .. }
            | IngestError::MalformedColumn { line, .. }
            | IngestError::Schema { line, .. } => Some(*line),
            IngestError::File { source, .. } => source.line(),
            IngestError::Io { .. } => None,
        }
    }

    pub(crate) fn in_file(self, path: impl Into<PathBuf>) -> Self {
        IngestError::File {
            path: path.into(),
            source: Box::new(self),
        }
    }
}

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("score shape mismatch at mention {mention}: {detail}")]
    ShapeMismatch { mention: usize, detail: String },
    #[error("score file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error("representation length {found} does not match cell length {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalyticsError {
    #[error("cluster has no mentions")]
    EmptyCluster,
    #[error("token index {index} out of range for document of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("input lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least two observations, got {0}")]
    TooFewObservations(usize),
    #[error("correlation undefined for constant input")]
    DegenerateInput,
}
