//! Conservation diagnostics, the diagnostics CSV and the run manifest.

use crate::config::{SolverConfig, CALIBRATED_C};
use crate::picard::SolveResult;
use crate::Result;
use littlewood_paley::{besov_norm, BesovParams};
use mixed_norms::{aux_norm, AuxFlavor, AuxParams};
use spectral_core::{Complex64, Field, FieldPath, Rep};
use std::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub times: Vec<f64>,
    /// `∫u`.
    pub mass: Vec<f64>,
    pub l2: Vec<f64>,
    /// `‖u(t)‖_{Ḃ^{s_c}_{2,q}}`.
    pub besov: Vec<f64>,
    /// `‖u‖_{(k,q,t)}` at the sampled nodes.
    pub aux: Vec<Option<f64>>,
    pub mass_drift: f64,
    pub l2_drift: f64,
}

pub fn real_part(f: &Field) -> Field {
    let s = f.to_space();
    let vals = s.values().iter().map(|v| Complex64::new(v.re, 0.0)).collect();
    Field::new(*f.grid(), vals, Rep::Space).expect("same length")
}

fn l1_norm(f: &Field) -> f64 {
    let s = f.to_space();
    s.grid().cell_volume() * s.values().iter().map(|v| v.norm()).sum::<f64>()
}

fn drift(series: &[f64], scale: f64) -> f64 {
    let d = series.iter().map(|v| (v - series[0]).abs()).fold(0.0, f64::max);
    if d == 0.0 {
        0.0
    } else {
        d / scale
    }
}

/// Max over nodes of `|∫u(t) − ∫u₀| / ∫|u₀|` and `|‖u(t)‖ − ‖u₀‖| / ‖u₀‖`.
pub fn conservation_diag(path: &FieldPath) -> (f64, f64) {
    let first = &path.snapshots()[0];
    let mass: Vec<f64> = path.snapshots().iter().map(|s| s.mean_mode().re).collect();
    let l2: Vec<f64> = path.snapshots().iter().map(|s| s.l2_norm()).collect();
    (drift(&mass, l1_norm(first)), drift(&l2, l2[0]))
}

fn sample_nodes(steps: usize, samples: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (1..=samples).map(|i| ((steps * i) as f64 / samples as f64).round() as usize).filter(|&j| j >= 1).collect();
    v.dedup();
    v
}

pub(crate) fn diagnostics(path: &FieldPath, cfg: &SolverConfig) -> Result<Diagnostics> {
    let sc = cfg.critical_index()?;
    let bp = BesovParams::new(sc, cfg.q)?;
    let times = (0..=path.steps()).map(|j| path.time(j)).collect();
    let mass = path.snapshots().iter().map(|s| s.mean_mode().re).collect();
    let l2 = path.snapshots().iter().map(|s| s.l2_norm()).collect();
    let besov = path.snapshots().iter().map(|s| besov_norm(s, bp)).collect::<std::result::Result<Vec<_>, _>>()?;
    let mut aux = vec![None; path.steps() + 1];
    if cfg.k >= 3 && cfg.aux_samples > 0 {
        let flavor = AuxFlavor::for_phase(cfg.phase());
        for j in sample_nodes(path.steps(), cfg.aux_samples) {
            let prm = AuxParams::new(cfg.n, cfg.k as i64, cfg.q, path.time(j))?;
            aux[j] = Some(aux_norm(path, &prm, flavor)?);
        }
    }
    let (mass_drift, l2_drift) = conservation_diag(path);
    Ok(Diagnostics { times, mass, l2, besov, aux, mass_drift, l2_drift })
}

/// `t,mass,l2,besov_sc,aux_norm`; unsampled aux entries read `nan`.
pub fn diagnostics_csv(d: &Diagnostics) -> String {
    let mut s = String::from("t,mass,l2,besov_sc,aux_norm\n");
    for j in 0..d.times.len() {
        let aux = d.aux[j].map_or("nan".to_string(), |v| format!("{v:.15e}"));
        writeln!(s, "{:.15e},{:.15e},{:.15e},{:.15e},{aux}", d.times[j], d.mass[j], d.l2[j], d.besov[j]).unwrap();
    }
    s
}

/// Flat `key = value` manifest of a solve: `extra` first (config echo,
/// seeds), then the solver settings and outcome.
pub fn manifest(cfg: &SolverConfig, result: Option<&SolveResult>, extra: &[(String, String)]) -> String {
    let mut s = String::new();
    for (k, v) in extra {
        writeln!(s, "{k} = {v}").unwrap();
    }
    let g = &cfg.grid;
    let rows: Vec<(&str, String)> = vec![
        ("artifact_version", env!("CARGO_PKG_VERSION").to_string()),
        ("solver.dimension", cfg.n.to_string()),
        ("solver.k", cfg.k.to_string()),
        ("solver.c0", cfg.c0.to_string()),
        ("solver.equation_form", cfg.form.to_string()),
        ("solver.coupling", cfg.coupling().to_string()),
        ("solver.L", g.length().to_string()),
        ("solver.M", g.points().to_string()),
        ("solver.T", cfg.t.to_string()),
        ("solver.steps", cfg.steps.to_string()),
        ("solver.time_nodes", (cfg.steps + 1).to_string()),
        ("solver.tol", cfg.tol.to_string()),
        ("solver.max_iter", cfg.max_iter.to_string()),
        ("solver.pad_factor", cfg.pad.to_string()),
        ("solver.q", cfg.q.to_string()),
        ("solver.contraction_C", cfg.c.to_string()),
        ("solver.calibrated_C", CALIBRATED_C.to_string()),
        ("solver.gate_threshold", cfg.gate_threshold().to_string()),
        ("solver.override_gate", cfg.override_gate.to_string()),
        ("solver.xdot_variation", "p=2 over the sampled time lattice".to_string()),
    ];
    for (k, v) in rows {
        writeln!(s, "{k} = {v}").unwrap();
    }
    if let Some(r) = result {
        if let Some(g) = r.gate {
            writeln!(s, "gate.value = {:.15e}\ngate.pass = {}", g.value, g.pass).unwrap();
        }
        writeln!(s, "picard.iterations = {}", r.iterations()).unwrap();
        writeln!(s, "picard.residuals = {}", r.residuals.iter().map(|v| format!("{v:.6e}")).collect::<Vec<_>>().join(" ")).unwrap();
        writeln!(s, "picard.max_decay_ratio = {:.6e}", r.max_decay_ratio()).unwrap();
        writeln!(s, "picard.fixed_point_residual = {:.6e}", r.fixed_point_residual).unwrap();
        writeln!(s, "diag.mass_drift = {:.6e}", r.diagnostics.mass_drift).unwrap();
        writeln!(s, "diag.l2_drift = {:.6e}", r.diagnostics.l2_drift).unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use propagators::{free_evolve, PhaseKind};
    use spectral_core::GridSpec;
    use std::f64::consts::PI;

    #[test]
    fn free_evolution_conserves() {
        let g = GridSpec::new(2, 8.0 * PI, 32).unwrap();
        let f = Field::from_real_fn(g, |x| (-(x[0] - 1.0).powi(2) - x[1] * x[1]).exp() + 0.1);
        let p = FieldPath::sample(1.0, 10, |t| free_evolve(&f, PhaseKind::Zk2d, t).unwrap()).unwrap();
        let (m, l) = conservation_diag(&p);
        assert!(m <= 1e-12 && l <= 1e-12, "{m} {l}");
    }

    #[test]
    fn node_sampling() {
        assert_eq!(sample_nodes(64, 4), vec![16, 32, 48, 64]);
        assert_eq!(sample_nodes(2, 4), vec![1, 2]);
        assert!(sample_nodes(5, 0).is_empty());
    }
}
