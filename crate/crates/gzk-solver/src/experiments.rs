//! Scaling, Lipschitz, small-data global, frame-equivalence and calibration
//! experiments built on [`picard_solve`].

use crate::config::{EquationForm, SolverConfig};
use crate::datum::Datum;
use crate::picard::{free_path, gate_of_path, picard_solve, SolveResult};
use crate::{Result, SolverError};
use estimate_lab::xdot_norm;
use littlewood_paley::{besov_norm, sobolev_homog_norm, BesovParams};
use log::info;
use propagators::{pullback_r0, AnalyticDatum, Direction};
use spectral_core::{Complex64, Field, GridSpec, Rep};

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub lambda: f64,
    /// `|‖u_λ(0)‖_{Ḣ^{s_c}} / ‖u₀‖_{Ḣ^{s_c}} − 1|`.
    pub hsc_deviation: f64,
    /// `‖u_λ(0)‖_{Ḣ^{s_c+1/2}} / ‖u₀‖_{Ḣ^{s_c+1/2}}`, ideally `λ^{1/2}`.
    pub half_ratio: f64,
    /// Max over nodes of the relative L² mismatch `u_λ(t) ↔ λ^{2/k}u(λ³t, λ·)`.
    pub path_mismatch: f64,
}

/// Relative energy of `f` outside the inner half of the lattice.
fn outer_energy(f: &Field) -> f64 {
    let g = f.grid();
    let n = g.dim();
    let quarter = (g.points() / 4) as i64;
    let s = f.to_frequency();
    let (mut out, mut all) = (0.0, 0.0);
    for (i, v) in s.values().iter().enumerate() {
        let e = v.norm_sqr();
        all += e;
        if g.unflatten(i)[..n].iter().any(|&j| g.signed_mode(j).abs() > quarter) {
            out += e;
        }
    }
    if all == 0.0 {
        0.0
    } else {
        out / all
    }
}

/// Solves from `u₀` on `(L, M)` over `T` and from `λ^{2/k}u₀(λ·)` on
/// `(L/λ, M)` over `T/λ³`; the rescaled datum has the same node values.
pub fn scaling_experiment(u0: &Field, cfg: &SolverConfig, lambda: f64) -> Result<ScalingReport> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(SolverError::Config(format!("scaling factor must be positive, got {lambda}")));
    }
    let tail = outer_energy(u0);
    if tail > 1e-6 {
        return Err(SolverError::Unresolved(format!("datum carries relative energy {tail:e} in the outer half of the lattice")));
    }
    let g = cfg.grid;
    let gb = GridSpec::new(g.dim(), g.length() / lambda, g.points())?;
    let amp = lambda.powf(2.0 / cfg.k as f64);
    let ub = Field::new(gb, u0.to_space().values().iter().map(|v| v * amp).collect(), Rep::Space)?;
    let sc = cfg.critical_index()?;
    let hsc_deviation = (sobolev_homog_norm(&ub, sc) / sobolev_homog_norm(u0, sc) - 1.0).abs();
    let half_ratio = sobolev_homog_norm(&ub, sc + 0.5) / sobolev_homog_norm(u0, sc + 0.5);
    let ra = picard_solve(u0, cfg)?;
    let rb = picard_solve(&ub, &cfg.with_window(gb, cfg.t / lambda.powi(3)))?;
    let mut path_mismatch: f64 = 0.0;
    for (a, b) in ra.solution.snapshots().iter().zip(rb.solution.snapshots()) {
        let (mut num, mut den) = (0.0, 0.0);
        for (va, vb) in a.values().iter().zip(b.values()) {
            num += (vb - va * amp).norm_sqr();
            den += (va * amp).norm_sqr();
        }
        if den > 0.0 {
            path_mismatch = path_mismatch.max((num / den).sqrt());
        }
    }
    Ok(ScalingReport { lambda, hsc_deviation, half_ratio, path_mismatch })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzRecord {
    /// `‖u₀ᵃ − u₀ᵇ‖_{Ḃ^{s_c}_{2,q}}`.
    pub data_distance: f64,
    /// `‖uᵃ − uᵇ‖_{Ẋ^{s_c}_q}`.
    pub solution_distance: f64,
    pub ratio: f64,
    /// Set when the data coincide (ratio reported as 0).
    pub identical: bool,
}

pub fn lipschitz_experiment(a: &Field, b: &Field, cfg: &SolverConfig) -> Result<LipschitzRecord> {
    let sc = cfg.critical_index()?;
    let data_distance = besov_norm(&a.sub(b)?, BesovParams::new(sc, cfg.q)?)?;
    let ra = picard_solve(a, cfg)?;
    if data_distance == 0.0 {
        return Ok(LipschitzRecord { data_distance, solution_distance: 0.0, ratio: 0.0, identical: true });
    }
    let rb = picard_solve(b, cfg)?;
    let solution_distance = xdot_norm(&ra.solution.sub(&rb.solution)?, cfg.phase(), sc, cfg.q)?;
    Ok(LipschitzRecord { data_distance, solution_distance, ratio: solution_distance / data_distance, identical: false })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalReport {
    pub eps: f64,
    pub t_long: f64,
    pub windows: usize,
    pub converged_windows: usize,
    /// `(t, ‖u(t)‖_{Ḃ^{s_c}_{2,q}})` over all nodes.
    pub besov_history: Vec<(f64, f64)>,
    pub initial: f64,
    pub sup: f64,
    /// Error text of the first failing window.
    pub failure: Option<String>,
}

impl GlobalReport {
    /// `sup_t ‖u(t)‖ ≤ 2 ‖u₀‖` and every window converged.
    pub fn bound_holds(&self) -> bool {
        self.failure.is_none() && self.converged_windows == self.windows && self.sup <= 2.0 * self.initial
    }
}

/// Windowed continuation over `[0, t_long]` in windows of length `cfg.t`
/// from `u₀` rescaled to `‖u₀‖_{Ḃ^{s_c}_{2,q}} = eps`. Failures end the run
/// and are recorded, not raised.
pub fn smalldata_global(u0: &Field, eps: f64, cfg: &SolverConfig, t_long: f64) -> Result<GlobalReport> {
    cfg.validate()?;
    if !(t_long > 0.0) || !(eps >= 0.0) {
        return Err(SolverError::Config(format!("need t_long > 0 and eps >= 0, got {t_long}, {eps}")));
    }
    let windows = (t_long / cfg.t - 1e-9).ceil().max(1.0) as usize;
    let bp = BesovParams::new(cfg.critical_index()?, cfg.q)?;
    let norm0 = besov_norm(u0, bp)?;
    if eps == 0.0 || norm0 == 0.0 {
        return Ok(GlobalReport {
            eps,
            t_long,
            windows,
            converged_windows: windows,
            besov_history: vec![(0.0, 0.0), (t_long, 0.0)],
            initial: 0.0,
            sup: 0.0,
            failure: None,
        });
    }
    let mut u = u0.scale(Complex64::new(eps / norm0, 0.0));
    let mut history = vec![(0.0, besov_norm(&u, bp)?)];
    let mut converged = 0;
    let mut failure = None;
    for win in 0..windows {
        let t0 = win as f64 * cfg.t;
        match picard_solve(&u, cfg) {
            Ok(r) => {
                converged += 1;
                for (j, b) in r.diagnostics.besov.iter().enumerate().skip(1) {
                    history.push((t0 + r.solution.time(j), *b));
                }
                u = r.terminal().clone();
            }
            Err(e) => {
                info!("window {win} failed: {e}");
                failure = Some(e.to_string());
                break;
            }
        }
    }
    let initial = history[0].1;
    let sup = history.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(GlobalReport { eps, t_long, windows, converged_windows: converged, besov_history: history, initial, sup, failure })
}

/// Solves the symmetrized equation from `v₀` and the original one from
/// `Rv₀ = v₀∘R₀`, both sampled on `cfg.grid`, and returns the relative L²
/// mismatch at `T` between `u(T)` and `v(T)∘R₀`.
pub fn symmetrized_equivalence(v0: &AnalyticDatum, cfg: &SolverConfig) -> Result<f64> {
    let orig = SolverConfig { form: EquationForm::Original, ..cfg.clone() };
    let sym = SolverConfig { form: EquationForm::Symmetrized, ..cfg.clone() };
    let u = picard_solve(&v0.apply_r(Direction::Forward)?.sample(&cfg.grid)?, &orig)?;
    let v = picard_solve(&v0.sample(&cfg.grid)?, &sym)?;
    let mapped = pullback_r0(v.terminal())?;
    Ok(mapped.sub(u.terminal())?.l2_norm() / u.terminal().l2_norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationRow {
    pub datum: Datum,
    /// `‖U u₀‖_{(k,q,T)}`.
    pub gate_value: f64,
    /// Largest Picard decay ratio; infinite when the iteration failed.
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub rows: Vec<CalibrationRow>,
    /// Largest gate value below every failing run.
    pub admitted: f64,
    /// Smallest gate value with ratio > 1/2 (infinite if none).
    pub first_failure: f64,
    /// `C = ¼ · admitted^{-1/k}`, so that `(4C)^{-k} = admitted`.
    pub c: f64,
}

/// Runs every datum (gate overridden) and picks the smallest `C` whose gate
/// admits only runs with Picard ratio ≤ 1/2.
pub fn calibrate_c(data: &[Datum], cfg: &SolverConfig) -> Result<Calibration> {
    let run_cfg = SolverConfig { override_gate: true, aux_samples: 0, ..cfg.clone() };
    let mut rows = Vec::new();
    for &datum in data {
        let u0 = datum.sample(&cfg.grid);
        let gate = gate_of_path(&free_path(&u0, &run_cfg)?, &run_cfg)?;
        let max_ratio = match picard_solve(&u0, &run_cfg) {
            Ok(r) => r.max_decay_ratio(),
            Err(SolverError::NonConvergence { .. }) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        info!("calibration {datum}: gate {:e}, ratio {max_ratio:e}", gate.value);
        rows.push(CalibrationRow { datum, gate_value: gate.value, max_ratio });
    }
    let first_failure = rows.iter().filter(|r| !(r.max_ratio <= 0.5)).map(|r| r.gate_value).fold(f64::INFINITY, f64::min);
    let admitted = rows.iter().filter(|r| r.gate_value < first_failure).map(|r| r.gate_value).fold(0.0, f64::max);
    if admitted == 0.0 {
        return Err(SolverError::Config("calibration ensemble admits no run; add smaller amplitudes".into()));
    }
    let c = 0.25 * admitted.powf(-1.0 / cfg.k as f64);
    Ok(Calibration { rows, admitted, first_failure, c })
}

/// Convenience: the result of [`picard_solve`] for a recipe datum.
pub fn solve_datum(datum: Datum, cfg: &SolverConfig) -> Result<SolveResult> {
    picard_solve(&datum.sample(&cfg.grid), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn outer_energy_detects_tails() {
        let g = GridSpec::new(2, 2.0 * PI, 16).unwrap();
        let lo = Field::plane_wave(g, &[1, 2], Complex64::new(1.0, 0.0));
        let hi = Field::plane_wave(g, &[6, 0], Complex64::new(1.0, 0.0));
        assert!(outer_energy(&lo) < 1e-28);
        assert!((outer_energy(&lo.add(&hi).unwrap()) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn trivial_global_run() {
        let cfg = SolverConfig { t: 0.5, steps: 4, ..SolverConfig::new(GridSpec::new(2, 8.0 * PI, 16).unwrap()) };
        let r = smalldata_global(&Datum::Zero.sample(&cfg.grid), 0.0, &cfg, 2.0).unwrap();
        assert!(r.bound_holds());
        assert_eq!(r.windows, 4);
    }
}
