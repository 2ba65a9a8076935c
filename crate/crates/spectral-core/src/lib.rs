//! Periodic-box spectral substrate: grids, transforms, Fourier multipliers,
//! dealiased products, quadrature and bit-exact field files.
//!
//! Spectra approximate `∫ e^{-i x·κ} u(x) dx` with weight `(L/M)^n`; the inverse
//! is `u(x) = L^{-n} Σ_κ û(κ) e^{i x·κ}`, so `‖u‖²_{L²} = L^{-n} Σ |û|²`.

pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod io;
pub mod spectral;

pub use error::{Result, SpectralError};
pub use field::{Field, FieldPath, Rep};
pub use grid::GridSpec;
pub use num_complex::Complex64;
pub use spectral::{
    apply_multiplier, apply_real_table, apply_table, dealias_product, dealiased_power, lp_space_norm,
    multiplier_table, padded_points, to_frequency, to_space, transfer_spectrum, trapezoid_weights,
};
