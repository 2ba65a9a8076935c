use crate::error::{Result, SpectralError};
use std::f64::consts::PI;

/// Isotropic periodic box `[-L/2, L/2)^n` sampled with `M` points per axis.
///
/// Axis 0 is `x`; axes 1.. are the transverse `y` directions. Flat indices are
/// row-major with the last axis fastest. Spectra are stored in FFT order, so
/// index `i` on an axis carries the signed mode `i` for `i < M/2` and `i - M`
/// otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n: usize,
    l: f64,
    m: usize,
}

impl GridSpec {
    pub fn new(n: usize, l: f64, m: usize) -> Result<Self> {
        if n != 2 && n != 3 {
            return Err(SpectralError::BadDimension(n));
        }
        if !m.is_power_of_two() {
            return Err(SpectralError::NotPowerOfTwo(m));
        }
        if m < 8 {
            return Err(SpectralError::TooFewPoints(m));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(SpectralError::BadLength(l));
        }
        Ok(GridSpec { n, l, m })
    }

    /// Even point counts that are not powers of two; used for padded
    /// product grids only.
    pub(crate) fn padded(n: usize, l: f64, m: usize) -> Self {
        debug_assert!(m % 2 == 0);
        GridSpec { n, l, m }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.l
    }

    pub fn points(&self) -> usize {
        self.m
    }

    /// Total number of nodes, `M^n`.
    pub fn len(&self) -> usize {
        self.m.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.l / self.m as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.n as i32)
    }

    /// Lattice spacing `2π/L` of the frequency grid.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.l
    }

    pub fn signed_mode(&self, i: usize) -> i64 {
        if i < self.m / 2 {
            i as i64
        } else {
            i as i64 - self.m as i64
        }
    }

    /// Axis index holding signed mode `m`, if it is on the lattice.
    pub fn mode_slot(&self, m: i64) -> Option<usize> {
        let half = (self.m / 2) as i64;
        if m < -half || m >= half {
            None
        } else if m >= 0 {
            Some(m as usize)
        } else {
            Some((m + self.m as i64) as usize)
        }
    }

    pub fn wavenumber(&self, i: usize) -> f64 {
        self.dk() * self.signed_mode(i) as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -0.5 * self.l + j as f64 * self.spacing()
    }

    /// Largest resolvable wavenumber magnitude per axis, `πM/L`.
    pub fn kmax(&self) -> f64 {
        PI * self.m as f64 / self.l
    }

    pub fn unflatten(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for a in (0..self.n).rev() {
            idx[a] = flat % self.m;
            flat /= self.m;
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx[..self.n].iter().fold(0, |acc, &i| acc * self.m + i)
    }

    /// Wavevector at a flat spectral index; unused trailing slots are zero.
    pub fn kappa(&self, flat: usize) -> [f64; 3] {
        let idx = self.unflatten(flat);
        let mut k = [0.0; 3];
        for a in 0..self.n {
            k[a] = self.wavenumber(idx[a]);
        }
        k
    }

    /// Node coordinates at a flat spatial index.
    pub fn position(&self, flat: usize) -> [f64; 3] {
        let idx = self.unflatten(flat);
        let mut x = [0.0; 3];
        for a in 0..self.n {
            x[a] = self.node(idx[a]);
        }
        x
    }

    /// Per-axis wavenumber table in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.wavenumber(i)).collect()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.m).map(|j| self.node(j)).collect()
    }
}
