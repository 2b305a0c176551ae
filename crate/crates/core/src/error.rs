use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("series diverges: {0}")]
    Divergence(String),
    #[error("invalid rank {rank} for family {family}")]
    InvalidRank { family: char, rank: usize },
    #[error("index {0} is not in J")]
    UnknownIndex(i32),
    #[error("degenerate dynamical weight: {0}")]
    Degenerate(String),
    #[error("inadmissible plaquette: {0}")]
    Inadmissible(String),
    #[error("unsupported family: {0}")]
    Unsupported(String),
    #[error("kappa construction failed: residual {0:e}")]
    Kappa(f64),
    #[error("singular matrix")]
    Singular,
    #[error("least-squares system is rank deficient ({rank} < {cols})")]
    RankDeficient { rank: usize, cols: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
