//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by geometric, algebraic and Fock-layer operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("dimension must be at least 3, got {0}")]
    UnsupportedDimension(usize),
    #[error("rotation block is not orthogonal (residual {0:.3e})")]
    NonOrthogonalRotation(f64),
    #[error("dilation parameter must be positive, got {0}")]
    NonPositiveDilation(f64),
    #[error("map has a pole at the requested point")]
    PoleAtPoint,
    #[error("decomposition does not apply: {0}")]
    NotApplicable(&'static str),
    #[error("image ball touches the unit sphere; interior factorization fails")]
    BoundaryTouching,
    #[error("element is outside the big cell (image of the origin is infinite)")]
    OutsideBigCell,
    #[error("element does not map the open unit ball into itself")]
    NotInS,
    #[error("point lies outside the domain of the invariant")]
    OutsideDomain,
    #[error("point lies outside the open unit ball")]
    OutsideDisk,
    #[error("polynomial is not harmonic")]
    NotHarmonic,
    #[error("spanning set is rank deficient at degree {0}")]
    RankDeficiency(usize),
    #[error("separation ratios sum to {0} >= 1 or a ball leaves the unit ball")]
    GeometricOverlap(f64),
    #[error("configuration is not strictly separated")]
    NonStrictConfig,
    #[error("particle budget exceeded: {got} > {max}")]
    ParticleOverflow { got: usize, max: usize },
    #[error("no point free of all image closures found within the sample budget")]
    NoFreePoint,
    #[error("arity mismatch: configuration has {0} slots, got {1} inputs")]
    ArityMismatch(usize, usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
