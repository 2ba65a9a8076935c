//! Mixed `L^p` norms over space-time paths, Riesz-type multipliers and the
//! auxiliary dyadic quantities `|P_N u|_{(k)}` with their Besov-type sums.

pub mod aux;
mod interp;
mod riesz;
mod spec;

pub use aux::{aux_band_quantity, aux_norm, aux_table, aux_table_csv, vanishing_window_check, AuxFlavor, AuxParams, AuxTerms};
pub use interp::{interpolate_bound, interpolate_bound_weighted};
pub use riesz::{riesz_apply, riesz_table, RieszOp, RieszSpec};
pub use spec::{mixed_norm, parse_exponent, AxisGroup, MixedAccumulator, MixedSpec};

use spectral_core::SpectralError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MixedError {
    #[error("cannot parse mixed-norm spec {0:?}: {1}")]
    Parse(String, String),
    #[error("exponent {0} must be >= 1")]
    BadExponent(f64),
    #[error("spec does not partition the axes {{x, y, t}}")]
    AxisMismatch,
    #[error("aux norms need k >= 3, got {0}")]
    PowerTooSmall(i64),
    #[error("time window T = {t} must be positive and within the path length {len}")]
    BadWindow { t: f64, len: f64 },
    #[error("r = {r} lies outside [{lo}, {hi}]")]
    OutsideRange { r: f64, lo: f64, hi: f64 },
    #[error("path is empty")]
    EmptyPath,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Lp(#[from] littlewood_paley::LpError),
}

pub type Result<T> = std::result::Result<T, MixedError>;
