//! Error types shared across the engine.

use thiserror::Error;

/// Unified error type for judging, tournaments, and advantage computation.
#[derive(Debug, Error)]
pub enum Error {
    /// A structural precondition of a tournament topology was not met.
    #[error("{topology}: {reason}")]
    Precondition { topology: String, reason: String },

    /// An argument violated the documented contract of a pure computation.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A judge was configured in a way that cannot serve the request.
    #[error("judge configuration: {0}")]
    Config(String),

    /// A remote judge call failed after exhausting its retry budget.
    #[error("remote judge failed for match {match_key} ({direction}): {detail}")]
    Transport {
        match_key: String,
        direction: String,
        detail: String,
    },

    /// A replay judge had no usable recorded entry for the requested comparison.
    #[error("replay miss for match {match_key}: {detail}")]
    ReplayMiss { match_key: String, detail: String },

    /// Reading or writing a persisted artifact failed.
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Key of the comparison a transport or replay failure refers to, if any.
    pub fn match_key(&self) -> Option<&str> {
        match self {
            Error::Transport { match_key, .. } | Error::ReplayMiss { match_key, .. } => {
                Some(match_key)
            }
            _ => None,
        }
    }

    pub(crate) fn precondition(topology: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Precondition {
            topology: topology.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
