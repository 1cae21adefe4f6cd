use thiserror::Error;

pub type Result<T> = std::result::Result<T, DmodError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DmodError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not nilpotent")]
    NotNilpotent,

    #[error("matrix is not unipotent (U - I is not nilpotent)")]
    NotUnipotent,

    #[error("matrix is singular")]
    Singular,

    #[error("ill-conditioned: {0}")]
    IllConditioned(String),

    #[error("matrices {0} and {1} do not commute")]
    NonCommuting(usize, usize),

    #[error("matrix {0} is not semisimple")]
    NotSemisimple(usize),

    #[error("Lie algebra is not nilpotent")]
    NotNilpotentAlgebra,

    #[error("invalid Lie algebra: {0}")]
    InvalidAlgebra(String),

    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),

    #[error("representations live on different algebras")]
    AlgebraMismatch,

    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),

    #[error("not equivalent: {0}")]
    NotEquivalent(String),

    #[error("image of E_{0}_{1} is not nilpotent")]
    NonNilpotentOffDiagonal(usize, usize),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("value not exactly representable: {0}")]
    NotExact(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl DmodError {
    /// Numerical failures, as opposed to malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, DmodError::IllConditioned(_))
    }
}
