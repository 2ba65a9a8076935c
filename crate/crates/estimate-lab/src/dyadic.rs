//! Dyadic summation: `‖F(v_1, …, v_{k+1})‖_{Ẋ^{s_c}_q} ≲ ∏_j ‖v_j‖_{(k,q)}` for
//! the Duhamel operator `F = ∫_0^t U(t − s) ∂(∏_j v_j)(s) ds` on multi-band
//! free solutions.

use crate::duhamel::{derivative_table, duhamel, xdot_norm, Derivative};
use crate::linear::TimeWindow;
use crate::multilinear::MultilinearConfig;
use crate::report::{EstimateReport, Resolution, Trial};
use crate::{trial_seed, Ensemble, LabError, Recipe, Result};
use littlewood_paley::{critical_index, project_band, DyadicBand};
use mixed_norms::{aux_norm, AuxFlavor, AuxParams};
use propagators::{PhaseKind, Propagator};
use spectral_core::{dealias_product, trapezoid_weights, Complex64, Field, FieldPath, GridSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicConfig {
    pub n: usize,
    pub k: i64,
    pub q: f64,
    /// Bands every input is spread over.
    pub bands: Vec<f64>,
    pub t_max: f64,
    pub nodes: usize,
    pub derivative: Derivative,
}

impl DyadicConfig {
    pub fn new(n: usize, k: i64, q: f64, bands: Vec<f64>) -> Self {
        DyadicConfig { n, k, q, bands, t_max: 1.0, nodes: 32, derivative: Derivative::Dx }
    }

    pub fn phase(&self) -> PhaseKind {
        if self.n == 3 {
            PhaseKind::Zk3d
        } else {
            PhaseKind::Sym2d
        }
    }

    fn top(&self) -> f64 {
        self.bands.iter().copied().fold(0.0, f64::max)
    }

    fn as_multilinear(&self) -> MultilinearConfig {
        let top = self.bands.iter().copied().fold(0.0, f64::max);
        MultilinearConfig {
            q: self.q,
            t_max: self.t_max,
            nodes: self.nodes,
            derivative: self.derivative,
            ..MultilinearConfig::new(self.n, self.k, vec![top; self.k as usize + 1], top)
        }
    }

    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        if self.bands.is_empty() {
            return Err(LabError::BadBands("empty band set".into()));
        }
        if !(self.q >= 1.0) {
            return Err(LabError::BadParameter(format!("q = {}", self.q)));
        }
        let lo = self.bands.iter().copied().fold(f64::INFINITY, f64::min);
        let mut m = self.as_multilinear();
        m.bands[0] = lo;
        m.validate(grid)
    }

    pub fn window(&self, grid: &GridSpec) -> Result<TimeWindow> {
        self.as_multilinear().window(grid)
    }
}

fn free_paths(prop: &Propagator, vs: &[Field], win: TimeWindow) -> Result<Vec<FieldPath>> {
    vs.iter()
        .map(|v| Ok(FieldPath::sample(win.t, win.steps, |t| prop.evolve(v, t).expect("grid checked"))?))
        .collect()
}

fn product_path(paths: &[FieldPath], k: i64, top: f64) -> Result<FieldPath> {
    let g = paths[0].grid();
    let pad = crate::multilinear::band_pad(g, k, top, g.points() / 2);
    let snaps = (0..paths[0].snapshots().len())
        .map(|j| {
            let fs: Vec<&Field> = paths.iter().map(|p| &p.snapshots()[j]).collect();
            dealias_product(&fs, pad)
        })
        .collect::<spectral_core::Result<Vec<_>>>()?;
    Ok(FieldPath::new(paths[0].dt(), snaps)?)
}

/// `(‖F‖_{Ẋ^{s_c}_q}, ∏_j ‖v_j‖_{(k,q,T)})` for data `v_j`.
pub fn dyadic_instance(cfg: &DyadicConfig, vs: &[Field]) -> Result<(f64, f64)> {
    let grid = *vs.first().ok_or_else(|| LabError::BadBands("no inputs".into()))?.grid();
    cfg.validate(&grid)?;
    if vs.len() != cfg.k as usize + 1 {
        return Err(LabError::BadBands(format!("{} inputs, k + 1 = {} needed", vs.len(), cfg.k + 1)));
    }
    let win = cfg.window(&grid)?;
    let prop = Propagator::new(cfg.phase(), &grid)?;
    let paths = free_paths(&prop, vs, win)?;
    let f = duhamel(&prop, cfg.derivative, &product_path(&paths, cfg.k, cfg.top())?)?;
    let lhs = xdot_norm(&f, cfg.phase(), critical_index(cfg.n, cfg.k)?, cfg.q)?;
    let prm = AuxParams::new(cfg.n, cfg.k, cfg.q, win.t)?;
    let flavor = AuxFlavor::for_phase(cfg.phase());
    let mut rhs = 1.0;
    for p in &paths {
        rhs *= aux_norm(p, &prm, flavor)?;
    }
    Ok((lhs, rhs))
}

pub fn dyadic_sum_check(cfg: &DyadicConfig, seed: u64, count: usize, grid: GridSpec) -> Result<EstimateReport> {
    use rayon::prelude::*;
    cfg.validate(&grid)?;
    let streams: Vec<Ensemble> = (0..=cfg.k as usize)
        .map(|j| Ensemble::new(trial_seed(seed, j), count, Recipe::MultiBand { ns: cfg.bands.clone() }, grid))
        .collect();
    let trials: Vec<Trial> = (0..count)
        .into_par_iter()
        .map(|i| {
            let data: Vec<Field> = streams.iter().map(|e| e.datum(i)).collect::<Result<_>>()?;
            let (lhs, rhs) = dyadic_instance(cfg, &data)?;
            Trial::new(lhs, rhs)
        })
        .collect::<Result<_>>()?;
    let win = cfg.window(&grid)?;
    let mut rep = EstimateReport::new("dyadic-sum", Resolution { l: grid.length(), m: grid.points(), dt: win.dt(), t: win.t });
    rep.trials = trials;
    rep.note("q", cfg.q);
    rep.note("bands", format!("{:?}", cfg.bands));
    rep.note("phase", cfg.phase().name());
    Ok(rep)
}

/// `(‖P_N F(T)‖, |∫_0^T ⟨∂∏v_j(s), w(s)⟩ ds|)` with `w(s) = U(s − T) z`,
/// `z = P_N F(T)/‖P_N F(T)‖`. The two agree up to time quadrature: the band
/// piece of the Duhamel output is dual to one multilinear instance.
pub fn duality_cross_check(cfg: &DyadicConfig, vs: &[Field], band: f64) -> Result<(f64, f64)> {
    let grid = *vs.first().ok_or_else(|| LabError::BadBands("no inputs".into()))?.grid();
    cfg.validate(&grid)?;
    let win = cfg.window(&grid)?;
    let prop = Propagator::new(cfg.phase(), &grid)?;
    let paths = free_paths(&prop, vs, win)?;
    let prod = product_path(&paths, cfg.k, cfg.top())?;
    let f = duhamel(&prop, cfg.derivative, &prod)?;
    let last = f.snapshots().last().expect("nonempty");
    let piece = project_band(last, DyadicBand::from_n(band))?;
    let nrm = piece.l2_norm();
    if nrm == 0.0 {
        return Ok((0.0, 0.0));
    }
    let z = piece.scale(Complex64::new(1.0 / nrm, 0.0));
    let dtab = derivative_table(&grid, cfg.derivative)?;
    let scale = grid.length().powi(-(grid.dim() as i32));
    let mut acc = Complex64::default();
    for (j, wt) in trapezoid_weights(win.steps, win.dt()).iter().enumerate() {
        let w = prop.evolve(&z, f.time(j) - win.t)?;
        let p = prod.snapshots()[j].to_frequency();
        let s: Complex64 = p.values().iter().zip(&dtab).zip(w.values()).map(|((a, d), b)| a * d * b.conj()).sum();
        acc += s * (wt * scale);
    }
    Ok((nrm, acc.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::new(2, 4.0 * std::f64::consts::PI, 32).unwrap()
    }

    fn data(cfg: &DyadicConfig, g: GridSpec) -> Vec<Field> {
        (0..=cfg.k as usize)
            .map(|j| Ensemble::new(40 + j as u64, 1, Recipe::MultiBand { ns: cfg.bands.clone() }, g).datum(0).unwrap())
            .collect()
    }

    #[test]
    fn zero_inputs_vanish() {
        let g = grid();
        let cfg = DyadicConfig { nodes: 8, t_max: 0.1, ..DyadicConfig::new(2, 3, 2.0, vec![1.0, 2.0]) };
        let mut vs = data(&cfg, g);
        vs[0] = Field::zeros(g, spectral_core::Rep::Space);
        assert_eq!(dyadic_instance(&cfg, &vs).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn band_piece_is_dual_to_a_pairing() {
        let g = grid();
        let cfg = DyadicConfig { nodes: 16, t_max: 0.5, ..DyadicConfig::new(2, 3, 2.0, vec![1.0, 2.0]) };
        let vs = data(&cfg, g);
        let (a, b) = duality_cross_check(&cfg, &vs, 2.0).unwrap();
        assert!(a > 0.0);
        assert!((a - b).abs() <= 0.1 * a, "{a} {b}");
    }
}
