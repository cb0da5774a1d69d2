use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("group order mismatch: D_{left} vs D_{right}")]
    GroupOrderMismatch { left: usize, right: usize },

    #[error("invalid group order {0}: dihedral groups need n >= 2")]
    InvalidOrder(usize),

    #[error("irreducible representation {label} does not exist for D_{n}")]
    InvalidIrrep { label: String, n: usize },

    #[error("invalid index: {0}")]
    InvalidIndex(String),

    #[error("invalid ring: {0}")]
    InvalidRing(String),

    #[error("invalid half_gap {half_gap}: must satisfy 0 < half_gap < pi/{n}")]
    InvalidHalfGap { half_gap: f64, n: usize },

    #[error("invalid mass {0}: must be finite and nonzero")]
    InvalidMass(f64),

    #[error("collision: {0}")]
    Collision(String),

    #[error("system not D_n-symmetric: {0}")]
    NotSymmetric(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("solver stalled: {0}")]
    SolverStalled(String),

    #[error("decomposition mismatch: {0}")]
    DecompositionMismatch(String),

    #[error("basis ill-conditioned: condition estimate {0:.3e}")]
    IllConditioned(f64),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
