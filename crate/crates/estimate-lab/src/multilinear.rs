//! Multilinear dyadic estimate
//! `N^{s_c}|∫∫ ∏_j P_{N_j}v_j · ∂P_N w| ≲ N^ε N₁^ε N_{k+1}^{−2ε} ∏_j |P_{N_j}v_j|_{(k)}`
//! tested against free solutions `v_j`, `w` on band data.

use crate::duhamel::{derivative_table, Derivative};
use crate::linear::TimeWindow;
use crate::report::{EstimateReport, Resolution, Trial};
use crate::{trial_seed, Ensemble, LabError, Recipe, Result};
use littlewood_paley::{critical_index, DyadicBand};
use mixed_norms::{aux_band_quantity, AuxFlavor, AuxParams};
use propagators::{PhaseKind, Propagator};
use spectral_core::{dealias_product, trapezoid_weights, Complex64, Field, FieldPath, GridSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct MultilinearConfig {
    pub n: usize,
    pub k: i64,
    /// `N₁ ≤ … ≤ N_{k+1}`.
    pub bands: Vec<f64>,
    /// Band of the test function `w`.
    pub n_out: f64,
    pub eps: f64,
    /// Summation exponent of the auxiliary norm (does not enter per band).
    pub q: f64,
    pub t_max: f64,
    /// Time nodes requested on `[0, t_max]`; refined further if the phase demands.
    pub nodes: usize,
    pub derivative: Derivative,
    /// Data supported in `ξ > 0` only (complex), so no resonance is possible.
    pub half_band: bool,
}

impl MultilinearConfig {
    pub fn new(n: usize, k: i64, bands: Vec<f64>, n_out: f64) -> Self {
        MultilinearConfig {
            n,
            k,
            bands,
            n_out,
            eps: 0.01,
            q: 2.0,
            t_max: 1.0,
            nodes: 32,
            derivative: Derivative::Dx,
            half_band: false,
        }
    }

    pub fn phase(&self) -> PhaseKind {
        if self.n == 3 {
            PhaseKind::Zk3d
        } else {
            PhaseKind::Sym2d
        }
    }

    pub fn recipe(&self, n: f64) -> Recipe {
        if self.half_band {
            Recipe::HalfBand { n }
        } else {
            Recipe::Band { n }
        }
    }

    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        if self.k < 3 {
            return Err(LabError::BadParameter(format!("k = {} (need k ≥ 3)", self.k)));
        }
        if !(self.n == 2 || self.n == 3) || grid.dim() != self.n {
            return Err(LabError::BadParameter(format!("dimension {} on a {}D grid", self.n, grid.dim())));
        }
        if self.bands.len() != self.k as usize + 1 {
            return Err(LabError::BadBands(format!("{} bands given, k + 1 = {} needed", self.bands.len(), self.k + 1)));
        }
        if self.bands.windows(2).any(|w| w[0] > w[1]) {
            return Err(LabError::BadBands("bands must be nondecreasing".into()));
        }
        let top = *self.bands.last().expect("nonempty");
        if self.n_out > 4.0 * top {
            return Err(LabError::BadBands(format!("N = {} exceeds 4·N_{{k+1}} = {}", self.n_out, 4.0 * top)));
        }
        let hi = ((grid.points() / 2) as f64 - 1.0) * grid.dk();
        for &b in self.bands.iter().chain([&self.n_out]) {
            if !(b >= grid.dk() && 0.5 * b < hi) {
                return Err(LabError::BadBands(format!("band N = {b} is not resolved (dk = {}, kmax = {hi})", grid.dk())));
            }
        }
        if !(self.eps >= 0.0) || !(self.t_max > 0.0) || self.nodes == 0 {
            return Err(LabError::BadParameter("ε ≥ 0, t_max > 0 and nodes ≥ 1 required".into()));
        }
        Ok(())
    }

    /// `Δt = min(t_max/nodes, 1/(4Φ))`, `Φ` the largest `|φ|` up to the top band.
    pub fn window(&self, grid: &GridSpec) -> Result<TimeWindow> {
        let prop = Propagator::new(self.phase(), grid)?;
        let top = self.bands.iter().copied().fold(self.n_out, f64::max);
        let n = grid.dim();
        let phi = (0..grid.len())
            .filter(|&i| grid.kappa(i)[..n].iter().map(|v| v * v).sum::<f64>() <= top * top)
            .map(|i| prop.phase()[i].abs())
            .fold(0.0f64, f64::max);
        let dt = (self.t_max / self.nodes as f64).min(if phi > 0.0 { 0.25 / phi } else { f64::INFINITY });
        TimeWindow::new(self.t_max, ((self.t_max / dt) - 1e-9).ceil().max(1.0) as usize)
    }
}

/// Smallest padding that keeps the `k+1`-fold product exact on `|m| ≤ keep`
/// when every factor lives in `|κ| ≤ top`; never more than the generic `(k+2)/2`.
pub(crate) fn band_pad(grid: &GridSpec, k: i64, top: f64, keep: usize) -> f64 {
    let half = grid.points() / 2;
    let m_top = ((top / grid.dk() + 1e-9).floor() as usize).min(half);
    let need = (k as usize + 1) * m_top + keep.min(half) + 1;
    (need as f64 / grid.points() as f64).clamp(1.0, (k as f64 + 2.0) / 2.0)
}

fn negated_slots(grid: &GridSpec) -> Vec<usize> {
    let (n, m) = (grid.dim(), grid.points());
    (0..grid.len())
        .map(|i| {
            let idx = grid.unflatten(i);
            let neg: Vec<usize> = idx[..n].iter().map(|&a| (m - a) % m).collect();
            grid.flatten(&neg)
        })
        .collect()
}

fn free_path(prop: &Propagator, v: &Field, win: TimeWindow) -> Result<FieldPath> {
    Ok(FieldPath::sample(win.t, win.steps, |t| prop.evolve(v, t).expect("grid checked"))?)
}

/// `(lhs, rhs)` of one instance with data `v_j` (in bands `N_j`) and `w₀` (band `N`).
pub fn multilinear_instance(cfg: &MultilinearConfig, vs: &[Field], w0: &Field) -> Result<(f64, f64)> {
    let grid = *w0.grid();
    cfg.validate(&grid)?;
    if vs.len() != cfg.bands.len() {
        return Err(LabError::BadBands(format!("{} inputs for {} bands", vs.len(), cfg.bands.len())));
    }
    let win = cfg.window(&grid)?;
    let prop = Propagator::new(cfg.phase(), &grid)?;
    let paths: Vec<FieldPath> = vs.iter().map(|v| free_path(&prop, v, win)).collect::<Result<_>>()?;
    let lhs = pairing(cfg, &prop, &paths, w0, win)?;
    let prm = AuxParams::new(cfg.n, cfg.k, cfg.q, win.t)?;
    let flavor = AuxFlavor::for_phase(cfg.phase());
    let mut rhs = cfg.n_out.powf(cfg.eps) * cfg.bands[0].powf(cfg.eps) * cfg.bands[cfg.k as usize].powf(-2.0 * cfg.eps);
    for (p, &b) in paths.iter().zip(&cfg.bands) {
        rhs *= aux_band_quantity(p, DyadicBand::from_n(b), &prm, flavor)?.total();
    }
    Ok((lhs, rhs))
}

/// `N^{s_c}|∫_0^T ∫ ∏ v_j(t) ∂w(t) dx dt|`, trapezoid in time.
fn pairing(cfg: &MultilinearConfig, prop: &Propagator, paths: &[FieldPath], w0: &Field, win: TimeWindow) -> Result<f64> {
    let grid = *w0.grid();
    let dtab = derivative_table(&grid, cfg.derivative)?;
    let neg = negated_slots(&grid);
    let top = cfg.bands.iter().copied().fold(0.0, f64::max);
    let keep = ((cfg.n_out / grid.dk()) + 1e-9).floor() as usize;
    let pad = band_pad(&grid, cfg.k, top, keep);
    let weights = trapezoid_weights(win.steps, win.dt());
    let scale = grid.length().powi(-(grid.dim() as i32));
    let mut total = Complex64::default();
    for (j, wt) in weights.iter().enumerate() {
        let fs: Vec<&Field> = paths.iter().map(|p| &p.snapshots()[j]).collect();
        let prod = dealias_product(&fs, pad)?;
        let w = prop.evolve(w0, win.t * j as f64 / win.steps as f64)?;
        let (pv, wv) = (prod.values(), w.values());
        let s: Complex64 = (0..grid.len()).map(|i| pv[i] * dtab[neg[i]] * wv[neg[i]]).sum();
        total += s * (wt * scale);
    }
    let sc = critical_index(cfg.n, cfg.k)?;
    Ok(cfg.n_out.powf(sc) * total.norm())
}

/// Ensemble run: trial `i` draws `v_j` from stream `j` and `w₀` from stream `k + 1`.
pub fn multilinear_check(cfg: &MultilinearConfig, seed: u64, count: usize, grid: GridSpec) -> Result<EstimateReport> {
    use rayon::prelude::*;
    cfg.validate(&grid)?;
    let streams: Vec<Ensemble> = cfg
        .bands
        .iter()
        .chain([&cfg.n_out])
        .enumerate()
        .map(|(j, &b)| Ensemble::new(trial_seed(seed, j), count, cfg.recipe(b), grid))
        .collect();
    let trials: Vec<Trial> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut data: Vec<Field> = streams.iter().map(|e| e.datum(i)).collect::<Result<_>>()?;
            let w0 = data.pop().expect("k + 2 streams");
            let (lhs, rhs) = multilinear_instance(cfg, &data, &w0)?;
            Trial::new(lhs, rhs)
        })
        .collect::<Result<_>>()?;
    let win = cfg.window(&grid)?;
    let mut rep = EstimateReport::new("multilinear", Resolution { l: grid.length(), m: grid.points(), dt: win.dt(), t: win.t });
    rep.trials = trials;
    rep.note("eps", cfg.eps);
    rep.note("bands", format!("{:?}", cfg.bands));
    rep.note("n_out", cfg.n_out);
    rep.note("phase", cfg.phase().name());
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_core::Rep;

    fn grid() -> GridSpec {
        GridSpec::new(2, 4.0 * std::f64::consts::PI, 32).unwrap()
    }

    fn cfg() -> MultilinearConfig {
        MultilinearConfig { nodes: 8, t_max: 0.25, ..MultilinearConfig::new(2, 3, vec![2.0; 4], 2.0) }
    }

    #[test]
    fn zero_factor_gives_zero_lhs() {
        let g = grid();
        let c = cfg();
        let mut vs: Vec<Field> = (0..4).map(|j| Ensemble::new(j, 1, Recipe::Band { n: 2.0 }, g).datum(0).unwrap()).collect();
        vs[2] = Field::zeros(g, Rep::Space);
        let w = Ensemble::new(9, 1, Recipe::Band { n: 2.0 }, g).datum(0).unwrap();
        let (lhs, rhs) = multilinear_instance(&c, &vs, &w).unwrap();
        assert_eq!((lhs, rhs), (0.0, 0.0));
    }

    #[test]
    fn half_plane_data_cannot_resonate() {
        let c = MultilinearConfig { half_band: true, ..cfg() };
        let r = multilinear_check(&c, 5, 2, grid()).unwrap();
        assert!(r.trials.iter().all(|t| t.lhs < 1e-12 * t.rhs));
    }

    #[test]
    fn band_constraints() {
        let g = grid();
        let far = MultilinearConfig::new(2, 3, vec![1.0; 4], 8.0);
        assert!(matches!(far.validate(&g), Err(LabError::BadBands(_))));
        let unresolved = MultilinearConfig::new(2, 3, vec![1.0, 1.0, 1.0, 64.0], 2.0);
        assert!(matches!(unresolved.validate(&g), Err(LabError::BadBands(_))));
        assert!(MultilinearConfig::new(2, 2, vec![1.0; 3], 1.0).validate(&g).is_err());
    }
}
