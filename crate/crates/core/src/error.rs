use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure class, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Data,
    Computation,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at row {row}: {reason}")]
    Parse { row: usize, reason: String },
    #[error("dataset contains no valid interactions")]
    EmptyDataset,
    #[error("sampling fraction must lie in (0, 1], got {0}")]
    InvalidFraction(f64),

    #[error("user `{0}` is not a node of the graph")]
    UnknownUser(String),
    #[error("pivot count {k} is outside 1..={nodes}")]
    InvalidPivotCount { k: usize, nodes: usize },

    #[error("score source unreachable: {0}")]
    SourceUnreachable(String),
    #[error("score {value} for user `{user}` is outside [0, 1]")]
    MalformedScore { user: String, value: f64 },
    #[error("invalid group specification: {0}")]
    InvalidSpec(String),
    #[error("no categorized users to group")]
    NoScores,
    #[error("no groups to analyse")]
    NoGroups,
    #[error("group {0} has no members")]
    EmptyGroup(usize),
    #[error("composition stage for group {0} adds no members")]
    EmptyStage(usize),
    #[error("invalid removal order: {0}")]
    InvalidOrder(String),

    #[error("{algorithm} did not converge within {max_iter} iterations")]
    NoConvergence {
        algorithm: &'static str,
        max_iter: usize,
    },
    #[error("graph has no edges")]
    NoEdges,
    #[error("iteration collapsed to the zero vector")]
    ZeroVector,

    #[error("no interactions fall inside the requested window")]
    EmptyWindow,
    #[error("tweet `{tweet}` is attributed to both `{first}` and `{second}`")]
    ConflictingAuthor {
        tweet: String,
        first: String,
        second: String,
    },
    #[error("no interaction carries a topic")]
    NoTopics,
    #[error("no perspective produced results")]
    NoResults,

    #[error("configuration error: {0}")]
    Config(String),
    #[error("perspective `{perspective}` failed: {source}")]
    Perspective {
        perspective: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound(path)
        } else {
            Error::Io { path, source }
        }
    }

    pub(crate) fn in_perspective(self, perspective: &'static str) -> Self {
        match self {
            e @ Error::Perspective { .. } => e,
            e => Error::Perspective {
                perspective,
                source: Box::new(e),
            },
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Config(_) | Error::InvalidSpec(_) | Error::InvalidOrder(_) => ErrorClass::Config,
            Error::InvalidFraction(_) | Error::InvalidPivotCount { .. } => ErrorClass::Config,
            Error::FileNotFound(_)
            | Error::Io { .. }
            | Error::Parse { .. }
            | Error::EmptyDataset
            | Error::UnknownUser(_)
            | Error::SourceUnreachable(_)
            | Error::MalformedScore { .. }
            | Error::NoScores
            | Error::EmptyWindow
            | Error::ConflictingAuthor { .. }
            | Error::NoTopics
            | Error::Json(_)
            | Error::Csv(_) => ErrorClass::Data,
            Error::Perspective { source, .. } => source.class(),
            _ => ErrorClass::Computation,
        }
    }
}
