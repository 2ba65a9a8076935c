use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("dimension must be 2 or 3, got {0}")]
    BadDimension(usize),
    #[error("point count M = {0} must be a power of two")]
    NotPowerOfTwo(usize),
    #[error("point count M = {0} is below the minimum of 8")]
    TooFewPoints(usize),
    #[error("box length must be positive and finite, got {0}")]
    BadLength(f64),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("expected {expected} values for this grid, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("multiplier is not finite at wavevector {0:?}")]
    NonFiniteMultiplier(Vec<f64>),
    #[error("pad factor {0} is below 1")]
    PadTooSmall(f64),
    #[error("integrability exponent {0} must be >= 1")]
    BadExponent(f64),
    #[error("a product needs at least one factor")]
    EmptyProduct,
    #[error("a path needs at least two snapshots, got {0}")]
    TooFewSnapshots(usize),
    #[error("time step must be positive and finite, got {0}")]
    BadTimeStep(f64),
    #[error("snapshots disagree in grid or representation")]
    MixedSnapshots,
}

pub type Result<T> = std::result::Result<T, SpectralError>;
