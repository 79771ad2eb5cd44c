use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix data has {len} entries, which is not dim^2 for dim {dim}")]
    BadShape { dim: usize, len: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("global unitary must have even dimension, found {0}")]
    OddDimension(usize),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("rank {rank} out of range for dimension {dim}")]
    RankOutOfRange { rank: usize, dim: usize },

    #[error("{name} = {value} is outside its admissible range")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("degenerate branch: way probability {w:e} too small for a conditional state")]
    DegenerateBranch { w: f64 },

    #[error("operation requires {0}")]
    Precondition(String),
}

impl Error {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Error::DegenerateBranch { .. })
    }
}
