//! Picard iteration `w^{m+1} = Λ_ψ w^m`, `w⁰ = 0`, over the whole window.

use crate::config::SolverConfig;
use crate::diag::{diagnostics, real_part, Diagnostics};
use crate::nonlinear::{same_lattice, strip_nyquist, Nonlinearity};
use crate::{Result, SolverError};
use estimate_lab::xdot_norm;
use littlewood_paley::{besov_norm, BesovParams};
use log::{debug, info};
use mixed_norms::{aux_norm, AuxFlavor, AuxParams};
use propagators::Propagator;
use spectral_core::{Complex64, Field, FieldPath, Rep};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateRecord {
    /// `‖U u₀‖_{(k,q,T)}`.
    pub value: f64,
    /// `(4C)^{-k}`.
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// `u = ψ + w`, space rep, real part.
    pub solution: FieldPath,
    /// `‖w^{m+1} − w^m‖_{Ẋ^{s_c}_q}`, `m = 0, 1, …`.
    pub residuals: Vec<f64>,
    /// `‖Λ_ψ w* − w*‖_{Ẋ^{s_c}_q}` of the returned fixed point.
    pub fixed_point_residual: f64,
    /// `‖u₀‖_{Ḃ^{s_c}_{2,q}}`, the scale of the relative tolerance.
    pub scale: f64,
    pub diagnostics: Diagnostics,
    /// `None` when the gate is undefined (k < 3) and was overridden.
    pub gate: Option<GateRecord>,
}

impl SolveResult {
    pub fn iterations(&self) -> usize {
        self.residuals.len()
    }

    /// Successive ratios `r_{m+1}/r_m`, skipping pairs where either residual
    /// sits at the round-off floor `1e-12·r₀`.
    pub fn decay_ratios(&self) -> Vec<f64> {
        let floor = 1e-12 * self.residuals.first().copied().unwrap_or(0.0);
        self.residuals.windows(2).filter(|w| w[0] > floor && w[1] > floor).map(|w| w[1] / w[0]).collect()
    }

    pub fn max_decay_ratio(&self) -> f64 {
        self.decay_ratios().into_iter().fold(0.0, f64::max)
    }

    pub fn terminal(&self) -> &Field {
        self.solution.snapshots().last().expect("nonempty path")
    }
}

/// `U(t_j)u₀` on the `K + 1` nodes of the window; frequency rep.
pub fn free_path(u0: &Field, cfg: &SolverConfig) -> Result<FieldPath> {
    let prop = Propagator::new(cfg.phase(), &cfg.grid)?;
    let f = u0.to_frequency();
    let snaps = (0..=cfg.steps).map(|j| prop.evolve(&f, j as f64 * cfg.dt())).collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(FieldPath::new(cfg.dt(), snaps)?)
}

fn aux_params(cfg: &SolverConfig, t: f64) -> Result<AuxParams> {
    Ok(AuxParams::new(cfg.n, cfg.k as i64, cfg.q, t)?)
}

pub(crate) fn gate_of_path(psi: &FieldPath, cfg: &SolverConfig) -> Result<GateRecord> {
    let value = aux_norm(psi, &aux_params(cfg, cfg.t)?, AuxFlavor::for_phase(cfg.phase()))?;
    let threshold = cfg.gate_threshold();
    Ok(GateRecord { value, threshold, pass: value <= threshold })
}

/// Aux norm of the free evolution on `[0, T]` against `(4C)^{-k}`.
pub fn lifespan_gate(u0: &Field, cfg: &SolverConfig) -> Result<GateRecord> {
    cfg.validate()?;
    if cfg.k < 3 {
        return Err(SolverError::GateUndefined(cfg.k));
    }
    gate_of_path(&free_path(u0, cfg)?, cfg)
}

fn check_datum(u0: &Field, cfg: &SolverConfig) -> Result<()> {
    if *u0.grid() != cfg.grid {
        return Err(SolverError::Mismatch);
    }
    let n = cfg.n as i32;
    let mean = u0.mean_mode().norm();
    // |∫u| ≤ L^{n/2}‖u‖
    let bound = cfg.grid.length().powf(n as f64 / 2.0) * u0.l2_norm();
    if mean > 1e-10 * bound {
        return Err(SolverError::NonZeroMean(mean / cfg.grid.length().powi(n)));
    }
    Ok(())
}

pub fn picard_solve(u0: &Field, cfg: &SolverConfig) -> Result<SolveResult> {
    picard_solve_from(u0, cfg, None)
}

/// Picard iteration from the start `w⁰` (zero when `None`).
pub fn picard_solve_from(u0: &Field, cfg: &SolverConfig, w0: Option<&FieldPath>) -> Result<SolveResult> {
    cfg.validate()?;
    check_datum(u0, cfg)?;
    let u0 = strip_nyquist(u0);
    let psi = free_path(&u0, cfg)?;
    let gate = if cfg.k >= 3 { Some(gate_of_path(&psi, cfg)?) } else { None };
    match gate {
        Some(g) if !g.pass && !cfg.override_gate => return Err(SolverError::GateFailed { value: g.value, threshold: g.threshold }),
        None if !cfg.override_gate => return Err(SolverError::GateUndefined(cfg.k)),
        _ => {}
    }
    let sc = cfg.critical_index()?;
    let scale = besov_norm(&u0, BesovParams::new(sc, cfg.q)?)?;
    let kind = cfg.phase();
    let nl = Nonlinearity::new(cfg)?;
    let prop = Propagator::new(kind, &cfg.grid)?;
    let mut w = match w0 {
        Some(w) => {
            same_lattice(w, &psi)?;
            w.in_rep(Rep::Frequency)
        }
        None => psi.scale(Complex64::default()),
    };
    let mut residuals = Vec::new();
    let target = cfg.tol * scale;
    let mut converged = false;
    for m in 0..cfg.max_iter {
        let next = nl.duhamel(&prop, &psi.add(&w)?)?;
        let r = xdot_norm(&next.sub(&w)?, kind, sc, cfg.q)?;
        debug!("picard iteration {m}: residual {r:e}");
        residuals.push(r);
        w = next;
        if !r.is_finite() || (m > 0 && r > 1e8 * residuals[0].max(f64::MIN_POSITIVE)) {
            break;
        }
        if r <= target {
            converged = true;
            break;
        }
    }
    if !converged {
        let residual = residuals.last().copied().unwrap_or(f64::NAN);
        return Err(SolverError::NonConvergence { iterations: residuals.len(), residual, tol: target, residuals });
    }
    let fixed_point_residual = xdot_norm(&nl.duhamel(&prop, &psi.add(&w)?)?.sub(&w)?, kind, sc, cfg.q)?;
    let solution = psi.add(&w)?.in_rep(Rep::Space).map(real_part)?;
    info!("picard converged in {} iterations, fixed-point residual {fixed_point_residual:e}", residuals.len());
    let diagnostics = diagnostics(&solution, cfg)?;
    Ok(SolveResult { solution, residuals, fixed_point_residual, scale, diagnostics, gate })
}
