use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("not skew-symmetric at entry ({i},{j})")]
    NotSkew { i: usize, j: usize },
    #[error("row {row} sums to {sum}, expected 0")]
    RowSum { row: usize, sum: String },
    #[error("edge ({0},{1}) has zero biresidue")]
    ZeroBiresidue(usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("symbolic error: {0}")]
    Symbolic(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    /// A checked mathematical statement failed. Never expected on valid input.
    #[error("{0}")]
    Defect(String),
}

impl Error {
    pub fn is_defect(&self) -> bool {
        matches!(self, Error::Defect(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
