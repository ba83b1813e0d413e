use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("group order exceeds the cap of {cap}")]
    CapExceeded { cap: usize },

    #[error("subgroup enumeration is limited to groups of order at most {limit}, got {order}")]
    SubgroupLimit { order: usize, limit: usize },

    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },

    #[error("action is not transitive")]
    NotTransitive,

    #[error("actions are of different groups")]
    DifferentGroups,

    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },

    #[error("unknown catalog group {0:?} (expected C_n, D_n, S_n, A_n or Q8)")]
    UnknownGroup(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
