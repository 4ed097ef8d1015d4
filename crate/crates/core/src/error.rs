use num_complex::Complex64;
use thiserror::Error;

/// Domain errors raised by the value-level operations of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("number of arrows n = {n} is not allowed here (need n >= {min})")]
    Arrows { n: u32, min: u32 },
    #[error("index k = {k} is out of range (need k >= {min})")]
    Index { k: i64, min: i64 },
    #[error("w = {w} lies outside the overlap strip 0 < Im w < pi")]
    OutsideStrip { w: Complex64 },
    #[error("w = {w} is not in the upper half plane")]
    NotUpperHalfPlane { w: Complex64 },
    #[error("labels ({a_index}, {b_index}) do not form an adjacent pair")]
    NotAdjacent { a_index: i64, b_index: i64 },
    #[error("mutation position {i} is out of range for a list of length {len}")]
    Position { i: usize, len: usize },
    #[error("both coordinates are zero")]
    ZeroPoint,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("tolerance must be positive, got {0}")]
    Tolerance(f64),
    #[error("matrix has determinant {0}, expected 1")]
    Determinant(String),
    #[error("point {0} belongs to the removed set")]
    RemovedPoint(String),
    #[error("label S_{index}[{shift}] is not generated by the heart simples")]
    ForeignLabel { index: i64, shift: i64 },
    #[error("degree table is missing the entry ({0}, {1})")]
    MissingDegree(usize, usize),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
