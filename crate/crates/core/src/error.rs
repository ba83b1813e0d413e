use thiserror::Error;

/// Errors raised by the group, orbit and spectral layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },
    #[error("residue {residue} out of range for Z/{modulus}")]
    Residue { residue: u64, modulus: u64 },
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid open set: {0}")]
    InvalidOpenSet(String),
    #[error("open set is empty")]
    EmptySet,
    #[error("polynomial has nonzero constant term {0} but theorem mode requires P(0) = 0")]
    NonzeroConstant(String),
    #[error("window [{lo}, {hi}] does not contain [1, {needed}]")]
    WindowTooShort { lo: i64, hi: i64, needed: u64 },
    #[error("invalid window [{lo}, {hi}]")]
    InvalidWindow { lo: i64, hi: i64 },
    #[error("grid size {grid} is smaller than 4 x window length {len}")]
    GridTooSmall { grid: usize, len: u64 },
    #[error(
        "exhaustive relation search supports at most 4 frequencies and height 100 \
         (got {count} frequencies, height {height}); use lattice-reduction mode"
    )]
    ExhaustiveLimit { count: usize, height: u64 },
    #[error("inconsistent relations: {0}")]
    InconsistentRelations(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("malformed RTS data: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape(expected: impl ToString, got: impl ToString) -> Error {
    Error::Shape {
        expected: expected.to_string(),
        got: got.to_string(),
    }
}
