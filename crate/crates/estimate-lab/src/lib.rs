//! Numerical corroboration of the linear smoothing, Strichartz and maximal
//! estimates, the oscillatory kernel bound and the multilinear dyadic
//! estimates, run over seeded ensembles of data.

pub mod duhamel;
pub mod dyadic;
pub mod ensemble;
pub mod holder;
pub mod kato;
pub mod kernel;
pub mod linear;
pub mod multilinear;
pub mod report;
pub mod suite;

pub use duhamel::{derivative_table, duhamel, filon_coefficients, xdot_norm, xdot_profile, Derivative};
pub use dyadic::{duality_cross_check, dyadic_sum_check, DyadicConfig};
pub use ensemble::{splitmix64, trial_seed, Ensemble, Recipe};
pub use holder::{holder_exponent_table, Case, HolderTable};
pub use kato::{
    kato_3d, kato_constant, kato_fullgradient_2d, kato_functional, kato_identity_2d, kato_identity_report, kato_y_2d,
    KatoMeasurement, KatoWindow,
};
pub use kernel::{kernel_decay_scan, oscillatory_kernel, KernelScan, Quadrature};
pub use linear::{
    linear_ratio, maximal_check, retarded_maximal, retarded_maximal_check, run_linear, strichartz_check, LinearEstimate,
    MaximalFamily, StrichartzFamily, TimeWindow,
};
pub use multilinear::{multilinear_check, multilinear_instance, MultilinearConfig};
pub use report::{Check, EstimateReport, Resolution, Summary, Trial};
pub use suite::{run_estimate, table_ok, SuiteOutput, SuiteParams, ESTIMATE_IDS};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("inadmissible exponents: {0}")]
    Inadmissible(String),
    #[error("zero datum")]
    ZeroDatum,
    #[error("right-hand side vanishes")]
    ZeroRhs,
    #[error("zero forcing")]
    ZeroForcing,
    #[error("band configuration rejected: {0}")]
    BadBands(String),
    #[error("epsilon too large: {0}")]
    EpsilonTooLarge(String),
    #[error("quadrature did not converge within {budget} panels at x = {x}, t = {t}, eps = {eps}")]
    QuadratureBudget { x: f64, t: f64, eps: f64, budget: usize },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("unknown estimate id '{0}'")]
    UnknownEstimate(String),
    #[error(transparent)]
    Spectral(#[from] spectral_core::SpectralError),
    #[error(transparent)]
    Propagator(#[from] propagators::PropagatorError),
    #[error(transparent)]
    Mixed(#[from] mixed_norms::MixedError),
    #[error(transparent)]
    Lp(#[from] littlewood_paley::LpError),
    #[error(transparent)]
    Variation(#[from] variation_spaces::VariationError),
}

pub type Result<T> = std::result::Result<T, LabError>;
