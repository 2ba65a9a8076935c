//! Cubic dispersion phases, free evolutions `e^{itφ(D)}`, and the linear map
//! `R₀` conjugating the 2D ZK phase to the symmetric one.

pub mod analytic;
mod phase;
mod symmetrize;

pub use analytic::{conjugacy_test, pullback_r0, AnalyticDatum, Direction};
pub use phase::{free_evolve, PhaseKind, Propagator};
pub use symmetrize::{symmetrize_freq, SymmetrizerConstants};

use spectral_core::SpectralError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PropagatorError {
    #[error("phase {kind:?} acts on {expected} frequency components, got {got}")]
    DimensionMismatch { kind: PhaseKind, expected: usize, got: usize },
    #[error("the symmetrizing change of variables exists only in two dimensions")]
    NotTwoDimensional,
    #[error("datum outside the Gaussian-times-polynomial family: {0}")]
    NotInFamily(String),
    #[error("unknown phase kind {0:?}")]
    UnknownPhase(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

pub type Result<T> = std::result::Result<T, PropagatorError>;
