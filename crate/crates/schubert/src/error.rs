use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid rank matrix: {0}")]
    InvalidRankMatrix(String),
    #[error("invalid pillar set: {0}")]
    InvalidPillarSet(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
