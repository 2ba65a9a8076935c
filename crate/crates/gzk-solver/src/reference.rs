//! Independent oracle: the interaction-picture ODE `ż = U(−t) N(U(t)z)`
//! integrated by Dormand–Prince 5(4) with embedded error control, stepping
//! exactly onto the output nodes.

use crate::config::SolverConfig;
use crate::diag::real_part;
use crate::nonlinear::{strip_nyquist, Nonlinearity};
use crate::{Result, SolverError};
use log::debug;
use propagators::Propagator;
use spectral_core::{Complex64, Field, FieldPath, GridSpec, Rep};

/// Relative local error per unit time.
pub const REFERENCE_TOL: f64 = 1e-9;

const C: [f64; 6] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0];
const A: [&[f64]; 6] = [
    &[],
    &[0.2],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &[Complex64], h: f64, coeffs: &[f64], ks: &[Vec<Complex64>]) -> Vec<Complex64> {
    let mut out = y.to_vec();
    for (c, k) in coeffs.iter().zip(ks) {
        if *c != 0.0 {
            for (o, v) in out.iter_mut().zip(k) {
                *o += v * (h * c);
            }
        }
    }
    out
}

/// Integrates `ẏ = rhs(t, y)` from `times[0]`, returning the state at every
/// entry of `times`. Steps are accepted when the embedded estimate satisfies
/// `‖err‖ ≤ tol · h · ‖y‖` (relative error per unit time).
pub fn dormand_prince(
    y0: Vec<Complex64>,
    times: &[f64],
    tol: f64,
    rhs: impl Fn(f64, &[Complex64]) -> Result<Vec<Complex64>>,
) -> Result<Vec<Vec<Complex64>>> {
    let span = times.last().copied().unwrap_or(0.0) - times[0];
    let mut out = vec![y0.clone()];
    let mut y = y0;
    let mut t = times[0];
    let mut h = times.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min).min(span.max(0.0));
    let mut k1 = rhs(t, &y)?;
    let (mut accepted, mut rejected) = (0usize, 0usize);
    for &target in &times[1..] {
        while t < target {
            let last = target - t <= h * (1.0 + 1e-12);
            let step = if last { target - t } else { h };
            if step < 1e-13 * span.max(1.0) && !last {
                return Err(SolverError::StepUnderflow { t, h: step });
            }
            let mut ks = vec![k1.clone()];
            for i in 1..6 {
                let yi = axpy(&y, step, A[i], &ks);
                ks.push(rhs(t + C[i] * step, &yi)?);
            }
            let y5 = axpy(&y, step, &B5[..6], &ks);
            let k7 = rhs(t + step, &y5)?;
            ks.push(k7);
            let err: Vec<Complex64> =
                (0..y.len()).map(|i| (0..7).map(|s| ks[s][i] * (B5[s] - B4[s])).sum::<Complex64>() * step).collect();
            let e = norm(&err);
            let allowed = tol * step * norm(&y5).max(norm(&y));
            let fac = if !(e.is_finite() && allowed.is_finite()) {
                0.2
            } else if e == 0.0 {
                5.0
            } else {
                (0.9 * (allowed / e).powf(0.25)).clamp(0.2, 5.0)
            };
            if e.is_finite() && e <= allowed {
                accepted += 1;
                t = if last { target } else { t + step };
                y = y5;
                k1 = ks.pop().expect("seven stages");
                if !last || fac < 1.0 {
                    h = step * fac;
                }
            } else {
                rejected += 1;
                h = step * fac;
                if h < 1e-13 * span.max(1.0) {
                    return Err(SolverError::StepUnderflow { t, h });
                }
            }
        }
        out.push(y.clone());
    }
    debug!("dormand-prince: {accepted} accepted, {rejected} rejected steps");
    Ok(out)
}

/// Interaction-picture problem on a 2D/3D grid.
#[derive(Debug, Clone)]
pub struct IfProblem {
    grid: GridSpec,
    phase: Vec<f64>,
    nl: Nonlinearity,
}

impl IfProblem {
    pub fn new(cfg: &SolverConfig) -> Result<Self> {
        let prop = Propagator::new(cfg.phase(), &cfg.grid)?;
        Ok(IfProblem { grid: cfg.grid, phase: prop.phase().to_vec(), nl: Nonlinearity::new(cfg)? })
    }

    /// `U(−t) N(U(t) z)` for an interaction-picture spectrum `z`.
    pub fn rhs(&self, t: f64, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let x: Vec<Complex64> = z.iter().zip(&self.phase).map(|(v, p)| v * Complex64::from_polar(1.0, t * p)).collect();
        let g = self.nl.forcing(&Field::new(self.grid, x, Rep::Frequency)?)?;
        Ok(g.into_iter().zip(&self.phase).map(|(v, p)| v * Complex64::from_polar(1.0, -t * p)).collect())
    }

    pub fn integrate(&self, u0: &Field, t_end: f64, steps: usize, tol: f64) -> Result<FieldPath> {
        let dt = t_end / steps as f64;
        let times: Vec<f64> = (0..=steps).map(|j| j as f64 * dt).collect();
        let zs = dormand_prince(strip_nyquist(u0).into_values(), &times, tol, |t, z| self.rhs(t, z))?;
        let snaps = zs
            .into_iter()
            .zip(&times)
            .map(|(z, &t)| {
                let x = z.iter().zip(&self.phase).map(|(v, p)| v * Complex64::from_polar(1.0, t * p)).collect();
                Ok(real_part(&Field::new(self.grid, x, Rep::Frequency)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FieldPath::new(dt, snaps)?)
    }
}

pub fn reference_solve(u0: &Field, cfg: &SolverConfig) -> Result<FieldPath> {
    reference_solve_with(u0, cfg, REFERENCE_TOL)
}

pub fn reference_solve_with(u0: &Field, cfg: &SolverConfig, tol: f64) -> Result<FieldPath> {
    cfg.validate()?;
    if *u0.grid() != cfg.grid {
        return Err(SolverError::Mismatch);
    }
    IfProblem::new(cfg)?.integrate(u0, cfg.t, cfg.steps, tol)
}
