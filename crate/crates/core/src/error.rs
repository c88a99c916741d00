use std::path::PathBuf;

use thiserror::Error;

use crate::habitat::Position;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cell ({}, {}) is already occupied", .0.x, .0.y)]
    CellOccupied(Position),

    #[error("pheromone concentration must be non-negative, got {0}")]
    NegativeConcentration(f64),

    #[error("feature dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{path}: row {row}: {message}")]
    MalformedRow {
        path: PathBuf,
        row: u64,
        message: String,
    },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("invalid schedule: {0}")]
    Schedule(String),

    #[error("grid too full: {needed} items to place but only {free} empty cells")]
    GridFull { needed: usize, free: usize },

    #[error("insufficient items for evaluation: {0}")]
    InsufficientItems(String),

    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors that stem from user-supplied configuration or input data
    /// rather than from the simulation itself.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::MalformedRow { .. }
                | Error::Schedule(_)
                | Error::InvalidData(_)
                | Error::DimensionMismatch { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
