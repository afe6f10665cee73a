use std::path::PathBuf;

/// Errors produced by model construction, inference, training and the
/// identification pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("observation length {len} is shorter than model order {order}")]
    SequenceTooShort { len: usize, order: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("no state sequence has nonzero probability")]
    NoValidPath,

    #[error("brute-force enumeration of {paths} paths exceeds the guard of {limit}")]
    InstanceTooLarge { paths: f64, limit: u64 },

    #[error("degenerate training sequence (zero likelihood under the current model)")]
    DegenerateSequence,

    #[error("training failed: {0}")]
    TrainingFailed(String),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("speaker `{speaker}`: {source}")]
    Speaker {
        speaker: String,
        #[source]
        source: Box<Error>,
    },

    #[error("audio: {0}")]
    Audio(String),

    #[error("clip of {samples} samples is shorter than one {window}-sample window")]
    ClipTooShort { samples: usize, window: usize },

    #[error("registry is empty")]
    EmptyRegistry,

    #[error("unknown speaker `{0}`")]
    UnknownSpeaker(String),

    #[error("duplicate speaker `{0}`")]
    DuplicateSpeaker(String),

    #[error("malformed {what}: {detail}")]
    Format { what: String, detail: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn format(what: impl Into<String>, detail: impl std::fmt::Display) -> Self {
        Error::Format {
            what: what.into(),
            detail: detail.to_string(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    pub(crate) fn for_speaker(self, speaker: &str) -> Self {
        Error::Speaker {
            speaker: speaker.to_string(),
            source: Box::new(self),
        }
    }

    /// True for failures caused by numerics (no valid path, training
    /// collapse) rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NoValidPath | Error::DegenerateSequence | Error::TrainingFailed(_) => true,
            Error::Stage { source, .. } | Error::Speaker { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
