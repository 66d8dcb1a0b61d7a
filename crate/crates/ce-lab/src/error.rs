use thiserror::Error;

/// Errors surfaced by the laboratory's operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("player index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("dimension {n} out of supported range {min}..={max}")]
    DimensionOutOfRange { n: usize, min: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("edge ({v:#b}, coordinate {i}) has no committed label")]
    UncommittedEdge { v: u32, i: usize },

    #[error("no ordering with at most {threshold} preceding neighbors exists: a subset of {stuck} vertices has minimum internal degree {min_degree}")]
    PeelInfeasible {
        threshold: String,
        stuck: usize,
        min_degree: usize,
    },

    #[error("no support vertex meets the witness bound {bound}")]
    NoWitness { bound: String },

    #[error("all probability mass lies outside the compaction set Q'")]
    EmptyCompaction,

    #[error("not a valid path: vertices {at} and {next} are not hypercube neighbors")]
    NotAPath { at: u32, next: u32 },

    #[error("referee stepped after the game was already won")]
    SteppedAfterWin,

    #[error("linear feasibility failed on a game that must admit an equilibrium")]
    FeasibilityDefect,

    #[error("invalid instance data: {0}")]
    InvalidInstance(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
