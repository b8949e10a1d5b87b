use std::io;

use thiserror::Error;

use crate::grid::Cell;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no path: {0}")]
    NoPath(NoPathReason),

    #[error("cells {0} and {1} are not 8-adjacent")]
    NotAdjacent(Cell, Cell),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("empty region mask")]
    EmptyMask,

    #[error("format error: {0}")]
    Format(String),

    #[error("sample generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },

    #[error("region file missing: {0}")]
    RegionMissing(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Why a planner could not produce a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoPathReason {
    StartBlocked,
    GoalBlocked,
    StartOutsideMask,
    GoalOutsideMask,
    Disconnected,
}

impl std::fmt::Display for NoPathReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            NoPathReason::StartBlocked => "start cell is an obstacle",
            NoPathReason::GoalBlocked => "goal cell is an obstacle",
            NoPathReason::StartOutsideMask => "start cell lies outside the region mask",
            NoPathReason::GoalOutsideMask => "goal cell lies outside the region mask",
            NoPathReason::Disconnected => "start and goal are not connected",
        };
        f.write_str(s)
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
