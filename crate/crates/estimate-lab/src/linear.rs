//! Linear space-time estimates `‖A U_φ(t) v₀‖_{mixed} ≲ ‖B v₀‖_{L²}` on a
//! window `[0, T]`, and the retarded maximal estimate.

use crate::report::{EstimateReport, Resolution, Trial};
use crate::{Ensemble, LabError, Result};
use mixed_norms::{riesz_apply, AxisGroup, MixedSpec, RieszOp, RieszSpec};
use propagators::{PhaseKind, Propagator};
use spectral_core::{Complex64, Field, FieldPath, Rep};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeWindow {
    pub t: f64,
    pub steps: usize,
}

impl TimeWindow {
    pub fn new(t: f64, steps: usize) -> Result<Self> {
        if !(t > 0.0) || steps == 0 {
            return Err(LabError::BadParameter(format!("time window T = {t}, steps = {steps}")));
        }
        Ok(TimeWindow { t, steps })
    }

    pub fn dt(&self) -> f64 {
        self.t / self.steps as f64
    }

    /// Same window, twice as many nodes.
    pub fn halved(&self) -> Self {
        TimeWindow { t: self.t, steps: 2 * self.steps }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearEstimate {
    pub id: String,
    pub kind: PhaseKind,
    pub lhs_weight: Vec<RieszSpec>,
    pub spec: MixedSpec,
    pub rhs_weight: Vec<RieszSpec>,
}

/// `e^{iΔt φ}` per mode.
pub(crate) fn step_table(prop: &Propagator, dt: f64) -> Vec<Complex64> {
    prop.phase().iter().map(|&p| Complex64::from_polar(1.0, dt * p)).collect()
}

pub fn linear_lhs(est: &LinearEstimate, v0: &Field, win: TimeWindow) -> Result<f64> {
    let g = *v0.grid();
    let prop = Propagator::new(est.kind, &g)?;
    let step = step_table(&prop, win.dt());
    let mut s = riesz_apply(v0, &est.lhs_weight)?;
    let mut acc = est.spec.accumulator(&g, win.steps, win.dt());
    for j in 0..=win.steps {
        acc.push(j, s.to_space().values());
        for (v, e) in s.values_mut().iter_mut().zip(&step) {
            *v *= e;
        }
    }
    Ok(acc.finish())
}

pub fn linear_rhs(est: &LinearEstimate, v0: &Field) -> Result<f64> {
    Ok(riesz_apply(v0, &est.rhs_weight)?.l2_norm())
}

pub fn linear_ratio(est: &LinearEstimate, v0: &Field, win: TimeWindow) -> Result<Trial> {
    if v0.l2_norm() == 0.0 {
        return Err(LabError::ZeroDatum);
    }
    let rhs = linear_rhs(est, v0)?;
    if rhs == 0.0 {
        return Err(LabError::ZeroRhs);
    }
    Trial::new(linear_lhs(est, v0, win)?, rhs)
}

/// Ratio report over an ensemble; trials run in parallel, collected in order.
pub fn run_linear(est: &LinearEstimate, ensemble: &Ensemble, win: TimeWindow) -> Result<EstimateReport> {
    use rayon::prelude::*;
    let trials: Vec<Trial> = (0..ensemble.count)
        .into_par_iter()
        .map(|i| linear_ratio(est, &ensemble.datum(i)?, win))
        .collect::<Result<_>>()?;
    let g = ensemble.grid;
    let mut rep = EstimateReport::new(&est.id, Resolution { l: g.length(), m: g.points(), dt: win.dt(), t: win.t });
    rep.trials = trials;
    rep.note("phase", est.kind.name());
    rep.note("norm", &est.spec);
    Ok(rep)
}

fn ids(s: &[RieszSpec]) -> String {
    s.iter().map(|w| format!("{:?}^{}", w.op, w.sigma)).collect::<Vec<_>>().join("·")
}

impl std::fmt::Display for LinearEstimate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "‖[{}] U_{} v‖_{} ≲ ‖[{}] v‖_2", ids(&self.lhs_weight), self.kind.name(), self.spec, ids(&self.rhs_weight))
    }
}

/// Admissible Strichartz-type families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrichartzFamily {
    /// `‖(I_xI_y)^{1/2p} U_sym v‖_{L^p_t L^q_{xy}}`, `2 < p ≤ ∞`, `1/p + 1/q = 1/2`.
    SymGain { p: f64 },
    /// `‖K^{1/2p} U_zk u‖_{L^p_t L^q_{xy}}`, same range.
    ZkGain { p: f64 },
    /// `‖U_sym v‖_{L⁴_{xy}L^r_t} ≲ ‖(I_xI_y)^σ v‖`, `4 ≤ r ≤ ∞`, `σ = 1/4 − 3/(2r)`.
    SymMaxInterp { r: f64 },
    /// `‖U_sym v‖_{L⁴_{xy}L^r_t} ≲ ‖v‖_{Ḣ^s}`, `6 ≤ r ≤ ∞`, `s = 1/2 − 3/r`.
    SymSobolev { r: f64 },
    /// `‖I_x^s U_zk3 u‖_{L^p_{xyt}}`, `1/4 ≤ 1/p < 2/7`, `s = 6/p − 3/2`.
    Zk3dGain { p: f64 },
    /// `‖U_zk3 u‖_{L^p_{xy}L^q_t} ≲ ‖u‖_{Ḣ^s}`, `0 < 1/q ≤ 1/p < 2/7`,
    /// `1/q + 5/p ≤ 3/2`, `s = 3(1/2 − 1/p − 1/q)`.
    Zk3dMixed { p: f64, q: f64 },
}

const TOL: f64 = 1e-12;

fn inadmissible(s: &str) -> LabError {
    LabError::Inadmissible(s.to_string())
}

fn recip(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

impl StrichartzFamily {
    /// Derivative order on the side that carries it.
    pub fn order(&self) -> Result<f64> {
        match *self {
            StrichartzFamily::SymGain { p } | StrichartzFamily::ZkGain { p } => {
                if !(p > 2.0 + TOL) {
                    return Err(inadmissible("2 < p ≤ ∞ (the endpoint p = 2 is excluded)"));
                }
                Ok(0.5 * recip(p))
            }
            StrichartzFamily::SymMaxInterp { r } => {
                if !(r >= 4.0 - TOL) {
                    return Err(inadmissible("4 ≤ r ≤ ∞"));
                }
                Ok(0.25 - 1.5 * recip(r))
            }
            StrichartzFamily::SymSobolev { r } => {
                if !(r >= 6.0 - TOL) {
                    return Err(inadmissible("6 ≤ r ≤ ∞"));
                }
                Ok(0.5 - 3.0 * recip(r))
            }
            StrichartzFamily::Zk3dGain { p } => {
                let ip = recip(p);
                if !(ip >= 0.25 - TOL && ip < 2.0 / 7.0) {
                    return Err(inadmissible("1/4 ≤ 1/p < 2/7"));
                }
                Ok(6.0 * ip - 1.5)
            }
            StrichartzFamily::Zk3dMixed { p, q } => {
                let (ip, iq) = (recip(p), recip(q));
                if !(iq > 0.0) {
                    return Err(inadmissible("0 < 1/q"));
                }
                if !(iq <= ip + TOL) {
                    return Err(inadmissible("1/q ≤ 1/p"));
                }
                if !(ip < 2.0 / 7.0) {
                    return Err(inadmissible("1/p < 2/7"));
                }
                if !(iq + 5.0 * ip <= 1.5 + TOL) {
                    return Err(inadmissible("1/q + 5/p ≤ 3/2"));
                }
                Ok(3.0 * (0.5 - ip - iq))
            }
        }
    }

    pub fn build(&self) -> Result<LinearEstimate> {
        let s = self.order()?;
        let none = Vec::new;
        let (id, kind, lhs_weight, spec, rhs_weight) = match *self {
            StrichartzFamily::SymGain { p } => {
                let q = 1.0 / (0.5 - recip(p));
                ("strichartz-sym", PhaseKind::Sym2d, vec![RieszSpec::new(RieszOp::IxIy, s)], MixedSpec::time_space(p, q)?, none())
            }
            StrichartzFamily::ZkGain { p } => {
                let q = 1.0 / (0.5 - recip(p));
                ("strichartz-zk", PhaseKind::Zk2d, vec![RieszSpec::new(RieszOp::K, s)], MixedSpec::time_space(p, q)?, none())
            }
            StrichartzFamily::SymMaxInterp { r } => {
                ("strichartz-sym-interp", PhaseKind::Sym2d, none(), MixedSpec::space_time(4.0, r)?, vec![RieszSpec::new(RieszOp::IxIy, s)])
            }
            StrichartzFamily::SymSobolev { r } => {
                ("strichartz-sym-sobolev", PhaseKind::Sym2d, none(), MixedSpec::space_time(4.0, r)?, vec![RieszSpec::new(RieszOp::I, s)])
            }
            StrichartzFamily::Zk3dGain { p } => {
                ("strichartz-3d", PhaseKind::Zk3d, vec![RieszSpec::new(RieszOp::Ix, s)], MixedSpec::full(p)?, none())
            }
            StrichartzFamily::Zk3dMixed { p, q } => {
                ("strichartz-3d-mixed", PhaseKind::Zk3d, none(), MixedSpec::space_time(p, q)?, vec![RieszSpec::new(RieszOp::I, s)])
            }
        };
        Ok(LinearEstimate { id: id.to_string(), kind, lhs_weight, spec, rhs_weight })
    }
}

pub fn strichartz_check(family: StrichartzFamily, ensemble: &Ensemble, win: TimeWindow) -> Result<EstimateReport> {
    let est = family.build()?;
    check_grid(&est, ensemble)?;
    run_linear(&est, ensemble, win)
}

fn check_grid(est: &LinearEstimate, ensemble: &Ensemble) -> Result<()> {
    if est.kind.dim() != ensemble.grid.dim() {
        return Err(LabError::BadParameter(format!("{} needs a {}D grid", est.id, est.kind.dim())));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaximalFamily {
    /// `‖U_sym v‖_{L⁴_{xy}L^∞_t} ≲ ‖(I_xI_y)^{1/4} v‖`.
    Sym,
    /// `‖U_zk u‖_{L⁴_{xy}L^∞_t} ≲ ‖K^{1/4} u‖`.
    Zk,
    /// `‖U_zk u‖_{L⁴_x L^∞_{yt}} ≲ ‖K^{1/4} J_y^{s} u‖`, `s > 1/4`.
    ZkTransverse { jy: f64 },
    /// `‖U_sym3 u‖_{L⁴_{xy}L^∞_t} ≲ ‖I_x^{1/4} I_y^{1/2} u‖`.
    Sym3d,
}

impl MaximalFamily {
    pub fn build(&self) -> Result<LinearEstimate> {
        let max4 = MixedSpec::space_time(4.0, f64::INFINITY)?;
        let (id, kind, spec, rhs) = match *self {
            MaximalFamily::Sym => ("maximal-sym", PhaseKind::Sym2d, max4, vec![RieszSpec::new(RieszOp::IxIy, 0.25)]),
            MaximalFamily::Zk => ("maximal-zk", PhaseKind::Zk2d, max4, vec![RieszSpec::new(RieszOp::K, 0.25)]),
            MaximalFamily::ZkTransverse { jy } => {
                if !(jy > 0.25) {
                    return Err(inadmissible("the J_y exponent must exceed 1/4"));
                }
                let spec = MixedSpec::new(vec![
                    AxisGroup { x: true, y: false, t: false, p: 4.0 },
                    AxisGroup { x: false, y: true, t: true, p: f64::INFINITY },
                ])?;
                ("maximal-zk-x", PhaseKind::Zk2d, spec, vec![RieszSpec::new(RieszOp::K, 0.25), RieszSpec::new(RieszOp::Jy, jy)])
            }
            MaximalFamily::Sym3d => (
                "maximal-sym3d",
                PhaseKind::Sym3d,
                max4,
                vec![RieszSpec::new(RieszOp::Ix, 0.25), RieszSpec::new(RieszOp::Iy, 0.5)],
            ),
        };
        Ok(LinearEstimate { id: id.to_string(), kind, lhs_weight: Vec::new(), spec, rhs_weight: rhs })
    }
}

/// Maximal estimate with a Δt-halving study recorded as the stability value.
pub fn maximal_check(family: MaximalFamily, ensemble: &Ensemble, win: TimeWindow) -> Result<EstimateReport> {
    let est = family.build()?;
    check_grid(&est, ensemble)?;
    let coarse = run_linear(&est, ensemble, win)?;
    let fine = run_linear(&est, ensemble, win.halved())?;
    let mut rep = fine;
    rep.stability = Some(crate::report::relative_change(&coarse, &rep));
    rep.tolerance = 0.05;
    rep.note("stability_study", "dt halving");
    Ok(rep)
}

/// `F(t_m) = ∫_0^{t_m} U(t_m − s) f(s) ds`, trapezoid over the nodes of `f`.
pub fn retarded_maximal(f: &FieldPath, kind: PhaseKind) -> Result<FieldPath> {
    let g = *f.grid();
    let prop = Propagator::new(kind, &g)?;
    let dt = f.dt();
    let step = step_table(&prop, dt);
    let mut acc = Field::zeros(g, Rep::Frequency);
    let mut out = Vec::with_capacity(f.snapshots().len());
    for (m, s) in f.snapshots().iter().enumerate() {
        let fs = s.to_frequency();
        let c = if m == 0 { 0.5 * dt } else { dt };
        for ((a, e), v) in acc.values_mut().iter_mut().zip(&step).zip(fs.values()) {
            if m > 0 {
                *a *= e;
            }
            *a += c * v;
        }
        if m == 0 {
            out.push(Field::zeros(g, Rep::Frequency));
        } else {
            out.push(acc.zip_with(&fs, |a, v| a - 0.5 * dt * v)?);
        }
    }
    Ok(FieldPath::new(dt, out)?)
}

/// Separable forcing `f(x, s) = g(x)·sin²(πs/T)`, supported inside `[0, T]`.
pub fn separable_forcing(g: &Field, win: TimeWindow) -> Result<FieldPath> {
    let gs = g.to_frequency();
    Ok(FieldPath::sample(win.t, win.steps, |s| {
        let h = (std::f64::consts::PI * s / win.t).sin().powi(2);
        gs.scale(Complex64::new(h, 0.0))
    })?)
}

fn retarded_weight() -> Vec<RieszSpec> {
    vec![RieszSpec::new(RieszOp::IxIy, -0.5)]
}

/// `‖(I_xI_y)^{-1/2} F‖_{L⁴_{xy}L^∞_t}` against `‖f‖_{L^{4/3}_{xy}L¹_t}`.
pub fn retarded_ratio(f: &FieldPath) -> Result<Trial> {
    let rhs = mixed_norms::mixed_norm(f, &MixedSpec::space_time(4.0 / 3.0, 1.0)?);
    if rhs == 0.0 {
        return Err(LabError::ZeroForcing);
    }
    let big = retarded_maximal(f, PhaseKind::Sym2d)?;
    let w = retarded_weight();
    let weighted = big.map(|s| riesz_apply(s, &w).expect("grid checked"))?;
    let lhs = mixed_norms::mixed_norm(&weighted, &MixedSpec::space_time(4.0, f64::INFINITY)?);
    Trial::new(lhs, rhs)
}

/// Retarded maximal estimate over separable forcings built from an ensemble.
pub fn retarded_maximal_check(ensemble: &Ensemble, win: TimeWindow) -> Result<EstimateReport> {
    use rayon::prelude::*;
    if ensemble.grid.dim() != 2 {
        return Err(LabError::BadParameter("retarded maximal check is two-dimensional".into()));
    }
    let trials: Vec<Trial> = (0..ensemble.count)
        .into_par_iter()
        .map(|i| retarded_ratio(&separable_forcing(&ensemble.datum(i)?, win)?))
        .collect::<Result<_>>()?;
    let g = ensemble.grid;
    let mut rep = EstimateReport::new("retarded-maximal", Resolution { l: g.length(), m: g.points(), dt: win.dt(), t: win.t });
    rep.trials = trials;
    rep.note("forcing", "g(x)·sin²(πs/T)");
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_core::GridSpec;

    #[test]
    fn admissibility_names_the_constraint() {
        let e = StrichartzFamily::SymGain { p: 2.0 }.build().unwrap_err();
        assert!(e.to_string().contains("endpoint p = 2"));
        assert!(StrichartzFamily::Zk3dGain { p: 3.0 }.build().is_err());
        assert!(StrichartzFamily::Zk3dMixed { p: 4.0, q: 3.0 }.build().unwrap_err().to_string().contains("1/q ≤ 1/p"));
        assert!(MaximalFamily::ZkTransverse { jy: 0.25 }.build().is_err());
    }

    #[test]
    fn derivative_orders() {
        assert_eq!(StrichartzFamily::SymGain { p: 4.0 }.order().unwrap(), 0.125);
        assert_eq!(StrichartzFamily::Zk3dGain { p: 4.0 }.order().unwrap(), 0.0);
        assert!((StrichartzFamily::Zk3dGain { p: 3.75 }.order().unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(StrichartzFamily::Zk3dMixed { p: 4.0, q: 4.0 }.order().unwrap(), 0.0);
        assert_eq!(StrichartzFamily::SymMaxInterp { r: f64::INFINITY }.order().unwrap(), 0.25);
        assert_eq!(StrichartzFamily::SymSobolev { r: 6.0 }.order().unwrap(), 0.0);
        assert_eq!(StrichartzFamily::SymGain { p: 4.0 }.build().unwrap().spec.to_string(), "(t:4)(xy:4)");
    }

    #[test]
    fn unit_window_of_free_plane_wave() {
        // |U(t)e^{iκx}| is constant, so L^p_t L^q_x is L^{2/q} T^{1/p}
        let g = GridSpec::new(2, 8.0, 16).unwrap();
        let v = Field::plane_wave(g, &[1, 2], Complex64::new(1.0, 0.0));
        let est = LinearEstimate {
            id: "pw".into(),
            kind: PhaseKind::Sym2d,
            lhs_weight: vec![],
            spec: MixedSpec::time_space(4.0, 4.0).unwrap(),
            rhs_weight: vec![],
        };
        let lhs = linear_lhs(&est, &v, TimeWindow::new(2.0, 10).unwrap()).unwrap();
        assert!((lhs - (64.0f64).powf(0.25) * 2.0f64.powf(0.25)).abs() < 1e-12);
    }
}
