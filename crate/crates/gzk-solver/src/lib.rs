//! Small-data solver for `∂_t u + ∂_xΔu = c₀ ∂_x u^{k+1}` on the periodic box.
//!
//! The solution is built as the fixed point `u = ψ + w` with
//! `ψ = U(t)u₀` and `w = Λ_ψ w`, iterated over the whole time window and
//! measured in the discrete `Ẋ^{s_c}_q` norm. An adaptive Dormand–Prince
//! integrator in the interaction picture serves as an independent oracle.

pub mod config;
pub mod datum;
pub mod diag;
pub mod experiments;
pub mod nonlinear;
pub mod picard;
pub mod reference;

pub use config::{EquationForm, SolverConfig, CALIBRATED_C};
pub use datum::Datum;
pub use diag::{conservation_diag, diagnostics_csv, manifest, Diagnostics};
pub use experiments::{solve_datum, CalibrationRow, 
    calibrate_c, lipschitz_experiment, scaling_experiment, smalldata_global, symmetrized_equivalence, Calibration,
    GlobalReport, LipschitzRecord, ScalingReport,
};
pub use nonlinear::{duhamel_apply, strip_nyquist, Nonlinearity};
pub use picard::{free_path, lifespan_gate, picard_solve, picard_solve_from, GateRecord, SolveResult};
pub use reference::{reference_solve, reference_solve_with, IfProblem, REFERENCE_TOL};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("dealias pad factor {pad} too small for k = {k}: need at least (k+2)/2 = {need}")]
    PadTooSmall { pad: f64, k: u32, need: f64 },
    #[error("datum has nonzero mean {0:e}; the solver works on zero-mean data")]
    NonZeroMean(f64),
    #[error("lifespan gate failed: ‖U u₀‖_(k,q,T) = {value:e} exceeds (4C)^(-k) = {threshold:e}")]
    GateFailed { value: f64, threshold: f64 },
    #[error("the lifespan gate needs k >= 3 (got k = {0}); pass the override to run anyway")]
    GateUndefined(u32),
    #[error("Picard iteration did not converge after {iterations} iterations (last residual {residual:e}, tolerance {tol:e})")]
    NonConvergence { iterations: usize, residual: f64, tol: f64, residuals: Vec<f64> },
    #[error("reference integrator step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("run not resolvable: {0}")]
    Unresolved(String),
    #[error("paths live on different grids or time lattices")]
    Mismatch,
    #[error(transparent)]
    Spectral(#[from] spectral_core::SpectralError),
    #[error(transparent)]
    Propagator(#[from] propagators::PropagatorError),
    #[error(transparent)]
    Mixed(#[from] mixed_norms::MixedError),
    #[error(transparent)]
    Lp(#[from] littlewood_paley::LpError),
    #[error(transparent)]
    Lab(#[from] estimate_lab::LabError),
}

pub type Result<T> = std::result::Result<T, SolverError>;
