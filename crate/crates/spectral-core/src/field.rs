use crate::error::{Result, SpectralError};
use crate::grid::GridSpec;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rep {
    Space,
    Frequency,
}

/// A complex grid function at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<Complex64>,
    rep: Rep,
}

impl Field {
    pub fn new(grid: GridSpec, values: Vec<Complex64>, rep: Rep) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(SpectralError::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(Field { grid, values, rep })
    }

    pub(crate) fn raw(grid: GridSpec, values: Vec<Complex64>, rep: Rep) -> Self {
        Field { grid, values, rep }
    }

    pub fn zeros(grid: GridSpec, rep: Rep) -> Self {
        Field { grid, values: vec![Complex64::default(); grid.len()], rep }
    }

    /// Samples `f` at the nodes.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let n = grid.dim();
        let values = (0..grid.len()).map(|i| f(&grid.position(i)[..n])).collect();
        Field { grid, values, rep: Rep::Space }
    }

    pub fn from_real_fn(grid: GridSpec, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// Spectrum defined mode by mode from the wavevector.
    pub fn from_spectrum_fn(grid: GridSpec, mut f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let n = grid.dim();
        let values = (0..grid.len()).map(|i| f(&grid.kappa(i)[..n])).collect();
        Field { grid, values, rep: Rep::Frequency }
    }

    /// `amp · e^{i x·κ}` for the lattice wavevector with signed modes `modes`.
    pub fn plane_wave(grid: GridSpec, modes: &[i64], amp: Complex64) -> Self {
        let dk = grid.dk();
        Self::from_fn(grid, |x| {
            let ph: f64 = x.iter().zip(modes).map(|(xi, &m)| xi * dk * m as f64).sum();
            amp * Complex64::from_polar(1.0, ph)
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn rep(&self) -> Rep {
        self.rep
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn to_frequency(&self) -> Field {
        crate::spectral::to_frequency(self)
    }

    pub fn to_space(&self) -> Field {
        crate::spectral::to_space(self)
    }

    pub fn in_rep(&self, rep: Rep) -> Field {
        match rep {
            Rep::Space => self.to_space(),
            Rep::Frequency => self.to_frequency(),
        }
    }

    /// L² norm under the box quadrature (Parseval-consistent in either rep).
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (s * self.l2_weight()).sqrt()
    }

    /// `∫ conj(self)·other`, evaluated in the common rep.
    pub fn inner(&self, other: &Field) -> Result<Complex64> {
        self.check_compatible(other)?;
        let other = other.in_rep(self.rep);
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.l2_weight())
    }

    fn l2_weight(&self) -> f64 {
        match self.rep {
            Rep::Space => self.grid.cell_volume(),
            Rep::Frequency => self.grid.length().powi(-(self.grid.dim() as i32)),
        }
    }

    pub fn check_compatible(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            Err(SpectralError::GridMismatch)
        } else {
            Ok(())
        }
    }

    pub fn scale(&self, c: Complex64) -> Field {
        Field { grid: self.grid, values: self.values.iter().map(|v| v * c).collect(), rep: self.rep }
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn zip_with(&self, other: &Field, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Field> {
        self.check_compatible(other)?;
        let other = other.in_rep(self.rep);
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Field { grid: self.grid, values, rep: self.rep })
    }

    /// Zero-frequency coefficient.
    pub fn mean_mode(&self) -> Complex64 {
        match self.rep {
            Rep::Frequency => self.values[0],
            Rep::Space => self.to_frequency().values[0],
        }
    }

    /// True when the spectrum satisfies f̂(−κ) = conj f̂(κ) away from the
    /// Nyquist planes, to `tol` relative to the largest coefficient.
    pub fn is_conjugate_symmetric(&self, tol: f64) -> bool {
        let f = self.to_frequency();
        let g = &self.grid;
        let m = g.points();
        let scale = f.values.iter().fold(0.0f64, |a, v| a.max(v.norm())).max(f64::MIN_POSITIVE);
        (0..g.len()).all(|i| {
            let idx = g.unflatten(i);
            if idx[..g.dim()].iter().any(|&j| j == m / 2) {
                return true;
            }
            let mut neg = [0usize; 3];
            for a in 0..g.dim() {
                neg[a] = (m - idx[a]) % m;
            }
            let j = g.flatten(&neg);
            (f.values[i] - f.values[j].conj()).norm() <= tol * scale
        })
    }
}

/// A field sampled at `t_j = j·Δt`, `j = 0..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPath {
    grid: GridSpec,
    dt: f64,
    snapshots: Vec<Field>,
}

impl FieldPath {
    pub fn new(dt: f64, snapshots: Vec<Field>) -> Result<Self> {
        if snapshots.len() < 2 {
            return Err(SpectralError::TooFewSnapshots(snapshots.len()));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SpectralError::BadTimeStep(dt));
        }
        let grid = *snapshots[0].grid();
        let rep = snapshots[0].rep();
        if snapshots.iter().any(|s| *s.grid() != grid || s.rep() != rep) {
            return Err(SpectralError::MixedSnapshots);
        }
        Ok(FieldPath { grid, dt, snapshots })
    }

    /// Samples `f(t)` at `K+1` nodes on `[0, T]`.
    pub fn sample(t_end: f64, steps: usize, f: impl Fn(f64) -> Field) -> Result<Self> {
        let dt = t_end / steps as f64;
        let snaps = (0..=steps).map(|j| f(j as f64 * dt)).collect();
        Self::new(dt, snaps)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of steps `K` (one less than the snapshot count).
    pub fn steps(&self) -> usize {
        self.snapshots.len() - 1
    }

    pub fn t_end(&self) -> f64 {
        self.dt * self.steps() as f64
    }

    pub fn time(&self, j: usize) -> f64 {
        self.dt * j as f64
    }

    pub fn rep(&self) -> Rep {
        self.snapshots[0].rep()
    }

    pub fn snapshots(&self) -> &[Field] {
        &self.snapshots
    }

    pub fn into_snapshots(self) -> Vec<Field> {
        self.snapshots
    }

    pub fn map(&self, f: impl Fn(&Field) -> Field) -> Result<FieldPath> {
        FieldPath::new(self.dt, self.snapshots.iter().map(f).collect())
    }

    pub fn in_rep(&self, rep: Rep) -> FieldPath {
        FieldPath {
            grid: self.grid,
            dt: self.dt,
            snapshots: self.snapshots.iter().map(|s| s.in_rep(rep)).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> FieldPath {
        FieldPath { grid: self.grid, dt: self.dt, snapshots: self.snapshots.iter().map(|s| s.scale(c)).collect() }
    }

    pub fn zip_with(&self, other: &FieldPath, f: impl Fn(&Field, &Field) -> Result<Field>) -> Result<FieldPath> {
        if self.grid != other.grid || self.snapshots.len() != other.snapshots.len() {
            return Err(SpectralError::GridMismatch);
        }
        let snaps = self.snapshots.iter().zip(&other.snapshots).map(|(a, b)| f(a, b)).collect::<Result<_>>()?;
        FieldPath::new(self.dt, snaps)
    }

    pub fn add(&self, other: &FieldPath) -> Result<FieldPath> {
        self.zip_with(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &FieldPath) -> Result<FieldPath> {
        self.zip_with(other, |a, b| a.sub(b))
    }

    /// Keeps every `stride`-th snapshot.
    pub fn subsample(&self, stride: usize) -> Result<FieldPath> {
        let snaps = self.snapshots.iter().step_by(stride.max(1)).cloned().collect();
        FieldPath::new(self.dt * stride.max(1) as f64, snaps)
    }

    /// Leading window `[0, j·Δt]`.
    pub fn truncate(&self, j: usize) -> Result<FieldPath> {
        FieldPath::new(self.dt, self.snapshots[..=j.min(self.steps())].to_vec())
    }
}
