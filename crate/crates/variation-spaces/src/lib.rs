//! Wiener p-variation and the V^p / U^p machinery over sampled paths.
//!
//! All suprema over partitions are restricted to the sample times; this is
//! exact for step paths and a lower bound otherwise.

mod path;
mod step;

pub use path::{
    banded_vp_norms, p_variation, p_variation_from_distances, phase_adapted_vp, pulled_back, vp_norm, SampledPath,
};
pub use step::{duality_pair, make_atom, up_norm_lower, up_norm_upper, Atom, Partition, StepPath};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VariationError {
    #[error("variation exponent p = {0} must be >= 1")]
    BadExponent(f64),
    #[error("a path needs at least one sample")]
    EmptyPath,
    #[error("times must be strictly increasing (only the last may be +inf)")]
    NotIncreasing,
    #[error("expected {expected} values, got {got}")]
    CountMismatch { expected: usize, got: usize },
    #[error("values have inconsistent lengths")]
    RaggedValues,
    #[error("all step values are zero; cannot normalize to an atom")]
    ZeroAtom,
    #[error("decomposition is empty")]
    EmptyDecomposition,
    #[error(transparent)]
    Propagator(#[from] propagators::PropagatorError),
}

pub type Result<T> = std::result::Result<T, VariationError>;

/// Hölder conjugate `p/(p−1)` (∞ for p = 1).
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}
