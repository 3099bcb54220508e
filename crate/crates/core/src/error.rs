use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("polygon sets live in dimension 2, got dimension {0}")]
    PolygonDimension(usize),

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("point is not in the set (distance {distance:e})")]
    NotInSet { distance: f64 },

    #[error("configuration infeasible: point {index} lies {distance:e} outside its set")]
    Infeasible { index: usize, distance: f64 },

    #[error("nonsmooth point: adjacent points coincide at index {index}")]
    NonsmoothPoint { index: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("set {index} has no boundary chart: {reason}")]
    Unchartable { index: usize, reason: String },
}
