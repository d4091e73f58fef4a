use std::fmt::Display;
use std::path::Path;

use memcoref::{ConfigError, EngineError, IngestError, ScoreError};

/// Exit-code class of a failed command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Io,
    Parse,
    Config,
    Replay,
    Alignment,
}

#[derive(Debug)]
pub struct Failure {
    pub kind: Kind,
    pub message: String,
}

impl Failure {
    pub fn new(kind: Kind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }

    pub fn code(&self) -> u8 {
        match self.kind {
            Kind::Io => 1,
            Kind::Parse => 2,
            Kind::Config => 3,
            Kind::Replay => 4,
            Kind::Alignment => 5,
        }
    }

    pub fn write(path: &Path, e: impl Display) -> Self {
        Self::new(Kind::Io, format!("{}: {e}", path.display()))
    }
}

impl From<IngestError> for Failure {
    fn from(e: IngestError) -> Self {
        Self::new(Kind::Parse, e.to_string())
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Self::new(Kind::Config, e.to_string())
    }
}

impl From<ScoreError> for Failure {
    fn from(e: ScoreError) -> Self {
        let kind = match e {
            ScoreError::ShapeMismatch { .. } => Kind::Replay,
            ScoreError::Parse { .. } | ScoreError::Io { .. } => Kind::Parse,
        };
        Self::new(kind, e.to_string())
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Config(c) => c.into(),
            EngineError::Score(s) => s.into(),
            EngineError::DimensionMismatch { .. } => Self::new(Kind::Replay, e.to_string()),
        }
    }
}
