//! The dealiased nonlinearity `coupling · ∂ F[u^{k+1}]` and the Duhamel
//! operator `Λ_ψ w(t) = ∫_0^t U(t−s) ∂(w+ψ)^{k+1}(s) ds`.

use crate::config::{EquationForm, SolverConfig};
use crate::{Result, SolverError};
use estimate_lab::{derivative_table, duhamel, Derivative};
use propagators::Propagator;
use rayon::prelude::*;
use spectral_core::{dealiased_power, Complex64, Field, FieldPath, GridSpec, Rep};

#[derive(Debug, Clone)]
pub struct Nonlinearity {
    grid: GridSpec,
    power: u32,
    pad: f64,
    /// `coupling · (i·derivative symbol)`, zero on Nyquist slots.
    table: Vec<Complex64>,
}

impl Nonlinearity {
    pub fn new(cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let deriv = match cfg.form {
            EquationForm::Original => Derivative::Dx,
            EquationForm::Symmetrized => Derivative::DxPlusDy(1.0),
        };
        Ok(Self::from_table(cfg.grid, cfg.k + 1, cfg.pad, derivative_table(&cfg.grid, deriv)?, cfg.coupling()))
    }

    /// Raw constructor: `power`-th power, symbol `table` scaled by `coupling`.
    pub fn from_table(grid: GridSpec, power: u32, pad: f64, table: Vec<Complex64>, coupling: f64) -> Self {
        let half = grid.points() / 2;
        let n = grid.dim();
        let table = table
            .into_iter()
            .enumerate()
            .map(|(i, d)| if grid.unflatten(i)[..n].contains(&half) { Complex64::default() } else { d * coupling })
            .collect();
        Nonlinearity { grid, power, pad, table }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Spectrum of `coupling · ∂(f^{power})`.
    pub fn forcing(&self, f: &Field) -> Result<Vec<Complex64>> {
        let p = dealiased_power(f, self.power, self.pad)?;
        Ok(p.into_values().into_iter().zip(&self.table).map(|(v, d)| v * d).collect())
    }

    pub fn forcing_path(&self, u: &FieldPath) -> Result<FieldPath> {
        let snaps = u
            .snapshots()
            .par_iter()
            .map(|s| Ok(Field::new(self.grid, self.forcing(s)?, Rep::Frequency)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(FieldPath::new(u.dt(), snaps)?)
    }

    /// `∫_0^{t_m} U(t_m−s) ∂u^{power}(s) ds` on the nodes of `u` (frequency rep).
    pub fn duhamel(&self, prop: &Propagator, u: &FieldPath) -> Result<FieldPath> {
        Ok(duhamel(prop, Derivative::Identity, &self.forcing_path(u)?)?)
    }
}

/// Frequency-rep copy of `f` with the Nyquist planes zeroed. The solvers
/// evolve on the remaining modes, where the dealiased flow conserves `∫u²`.
pub fn strip_nyquist(f: &Field) -> Field {
    let g = *f.grid();
    let half = g.points() / 2;
    let n = g.dim();
    let vals = f
        .to_frequency()
        .into_values()
        .into_iter()
        .enumerate()
        .map(|(i, v)| if g.unflatten(i)[..n].contains(&half) { Complex64::default() } else { v })
        .collect();
    Field::new(g, vals, Rep::Frequency).expect("same length")
}

pub(crate) fn same_lattice(a: &FieldPath, b: &FieldPath) -> Result<()> {
    if a.grid() != b.grid() || a.steps() != b.steps() || (a.dt() - b.dt()).abs() > 1e-14 * a.dt() {
        return Err(SolverError::Mismatch);
    }
    Ok(())
}

/// `Λ_ψ w` for the equation in `cfg`; frequency rep, zero at `t = 0`.
pub fn duhamel_apply(psi: &FieldPath, w: &FieldPath, cfg: &SolverConfig) -> Result<FieldPath> {
    same_lattice(psi, w)?;
    if *psi.grid() != cfg.grid {
        return Err(SolverError::Mismatch);
    }
    let nl = Nonlinearity::new(cfg)?;
    let prop = Propagator::new(cfg.phase(), &cfg.grid)?;
    nl.duhamel(&prop, &psi.add(w)?)
}
