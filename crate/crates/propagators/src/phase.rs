use crate::{PropagatorError, Result};
use spectral_core::{Complex64, Field, GridSpec};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseKind {
    /// `ξ(ξ² + η²)`
    Zk2d,
    /// `ξ³ + η³`
    Sym2d,
    /// `ξ(ξ² + η₁² + η₂²)`
    Zk3d,
    /// `ξ³ + η₁³ + η₂³`
    Sym3d,
}

impl PhaseKind {
    pub fn dim(&self) -> usize {
        match self {
            PhaseKind::Zk2d | PhaseKind::Sym2d => 2,
            PhaseKind::Zk3d | PhaseKind::Sym3d => 3,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        matches!(self, PhaseKind::Sym2d | PhaseKind::Sym3d)
    }

    /// ZK phase of the given dimension.
    pub fn zk(n: usize) -> Self {
        if n == 3 {
            PhaseKind::Zk3d
        } else {
            PhaseKind::Zk2d
        }
    }

    pub fn eval(&self, k: &[f64]) -> Result<f64> {
        if k.len() != self.dim() {
            return Err(PropagatorError::DimensionMismatch { kind: *self, expected: self.dim(), got: k.len() });
        }
        Ok(self.eval_unchecked(k))
    }

    /// Phase value; trailing components beyond the dimension are ignored.
    pub fn eval_unchecked(&self, k: &[f64]) -> f64 {
        match self {
            PhaseKind::Zk2d => k[0] * (k[0] * k[0] + k[1] * k[1]),
            PhaseKind::Sym2d => k[0] * k[0] * k[0] + k[1] * k[1] * k[1],
            PhaseKind::Zk3d => k[0] * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]),
            PhaseKind::Sym3d => k[0] * k[0] * k[0] + k[1] * k[1] * k[1] + k[2] * k[2] * k[2],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PhaseKind::Zk2d => "zk2d",
            PhaseKind::Sym2d => "sym2d",
            PhaseKind::Zk3d => "zk3d",
            PhaseKind::Sym3d => "sym3d",
        }
    }
}

impl FromStr for PhaseKind {
    type Err = PropagatorError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zk2d" => Ok(PhaseKind::Zk2d),
            "sym2d" => Ok(PhaseKind::Sym2d),
            "zk3d" => Ok(PhaseKind::Zk3d),
            "sym3d" => Ok(PhaseKind::Sym3d),
            _ => Err(PropagatorError::UnknownPhase(s.into())),
        }
    }
}

/// Free group `U_φ(t) = e^{itφ(D)}` with the phase tabulated once per grid.
#[derive(Debug, Clone)]
pub struct Propagator {
    kind: PhaseKind,
    grid: GridSpec,
    phase: Vec<f64>,
}

impl Propagator {
    pub fn new(kind: PhaseKind, grid: &GridSpec) -> Result<Self> {
        if kind.dim() != grid.dim() {
            return Err(PropagatorError::DimensionMismatch { kind, expected: kind.dim(), got: grid.dim() });
        }
        let phase = (0..grid.len()).map(|i| kind.eval_unchecked(&grid.kappa(i))).collect();
        Ok(Propagator { kind, grid: *grid, phase })
    }

    pub fn kind(&self) -> PhaseKind {
        self.kind
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Phase table in FFT order.
    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    /// Largest `|φ|` on the lattice.
    pub fn max_frequency(&self) -> f64 {
        self.phase.iter().fold(0.0f64, |a, p| a.max(p.abs()))
    }

    /// `U(t) f`, frequency rep.
    pub fn evolve(&self, f: &Field, t: f64) -> Result<Field> {
        f.check_compatible(&Field::zeros(self.grid, f.rep()))?;
        let mut g = f.to_frequency();
        self.evolve_in_place(g.values_mut(), t);
        Ok(g)
    }

    /// Multiplies spectral values by `e^{itφ}` in place.
    pub fn evolve_in_place(&self, spec: &mut [Complex64], t: f64) {
        if t == 0.0 {
            return;
        }
        for (v, &p) in spec.iter_mut().zip(&self.phase) {
            *v *= Complex64::from_polar(1.0, t * p);
        }
    }
}

pub fn free_evolve(f: &Field, kind: PhaseKind, t: f64) -> Result<Field> {
    Propagator::new(kind, f.grid())?.evolve(f, t)
}
