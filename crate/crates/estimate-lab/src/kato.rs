//! Local smoothing functionals `sup_x ‖W U_φ(t) v₀(x, ·)‖_{L²_{y,t}}`.
//!
//! On each line parallel to the slicing axis the time integral over
//! `[-T, T]` is done exactly: `∫|Σ b_i e^{i(ξ_i x + tφ_i)}|² dt =
//! Σ b_i b̄_j e^{i(ξ_i−ξ_j)x} S_T(φ_i − φ_j)` with `S_T(Δ) = 2 sin(TΔ)/Δ`.
//! The transverse integral is Parseval over the remaining axes, and the
//! mode differences fold onto one inverse FFT along the slicing axis.

use crate::report::{EstimateReport, Resolution, Trial};
use crate::{Ensemble, LabError, Result};
use mixed_norms::{RieszOp, RieszSpec};
use propagators::{PhaseKind, Propagator};
use spectral_core::{fft::fft_lines, Complex64, Field};

/// Constant in `‖I_x U v₀‖_{L^∞_x L²_{yt}} = c‖v₀‖`. With `τ = ξ³` the slice
/// integral becomes `(1/2π)∫|ξ|²|v̂|²/(3ξ²) dξ = ‖v₀‖²/3`, so `c = 3^{-1/2}`.
pub fn kato_constant() -> f64 {
    (1.0f64 / 3.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KatoWindow {
    /// First half-width tried.
    pub t0: f64,
    /// Largest half-width before giving up.
    pub t_max: f64,
    /// Relative change between successive doublings that counts as converged.
    pub drift_tol: f64,
}

impl Default for KatoWindow {
    fn default() -> Self {
        KatoWindow { t0: 2.0, t_max: 64.0, drift_tol: 0.01 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KatoMeasurement {
    pub lhs: f64,
    pub norm: f64,
    /// `lhs / ‖v₀‖`.
    pub ratio: f64,
    /// Half-width of the final window.
    pub t: f64,
    /// Relative change over the last doubling.
    pub drift: f64,
    pub converged: bool,
}

#[inline]
fn sinc_kernel(t: f64, d: f64) -> f64 {
    let z = t * d;
    if z.abs() < 1e-4 {
        2.0 * t * (1.0 - z * z / 6.0)
    } else {
        2.0 * (z).sin() / d
    }
}

/// Slice profile `x_j ↦ ∫_{-T}^{T}∫ |W U(t)v₀|² dy dt` along `axis`, and its
/// maximum's square root.
pub fn kato_functional(v0: &Field, kind: PhaseKind, weight: &[RieszSpec], axis: usize, t: f64) -> Result<(f64, Vec<f64>)> {
    let g = *v0.grid();
    let n = g.dim();
    if axis >= n {
        return Err(LabError::BadParameter(format!("axis {axis} in {n} dimensions")));
    }
    if !(t > 0.0) {
        return Err(LabError::BadParameter(format!("window half-width {t}")));
    }
    let prop = Propagator::new(kind, &g)?;
    let phase = prop.phase();
    let spec = v0.to_frequency();
    let b: Vec<Complex64> = spec
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let k = g.kappa(i);
            v * weight.iter().map(|w| w.symbol(&k[..n])).product::<f64>()
        })
        .collect();
    let bmax = b.iter().fold(0.0f64, |a, v| a.max(v.norm()));
    if bmax == 0.0 {
        return Err(LabError::ZeroDatum);
    }
    let thresh = 1e-13 * bmax;
    let m = g.points();
    let stride = m.pow((n - 1 - axis) as u32);
    let mut c = vec![Complex64::default(); m];
    // (mode, b, φ, sin Tφ, cos Tφ): sin(TΔ) expands so the pair loop needs no
    // transcendental calls except when TΔ is small
    let mut line: Vec<(i64, Complex64, f64, f64, f64)> = Vec::with_capacity(m);
    for base in 0..g.len() {
        if g.unflatten(base)[axis] != 0 {
            continue;
        }
        line.clear();
        for j in 0..m {
            let i = base + j * stride;
            if b[i].norm() > thresh {
                let (s, co) = (t * phase[i]).sin_cos();
                line.push((g.signed_mode(j), b[i], phase[i], s, co));
            }
        }
        for &(mi, bi, pi, si, ci) in &line {
            for &(mj, bj, pj, sj, cj) in &line {
                let d = (mi - mj).rem_euclid(m as i64) as usize;
                let delta = pi - pj;
                let k = if (t * delta).abs() < 1e-3 { sinc_kernel(t, delta) } else { 2.0 * (si * cj - ci * sj) / delta };
                c[d] += bi * bj.conj() * k;
            }
        }
    }
    // node shift x_0 = -L/2 contributes (-1)^d
    for (d, v) in c.iter_mut().enumerate() {
        if d % 2 == 1 {
            *v = -*v;
        }
    }
    fft_lines(&mut c, m, true);
    let scale = g.length().powi(-(n as i32 + 1));
    let profile: Vec<f64> = c.iter().map(|v| (v.re * scale).max(0.0)).collect();
    let sup = profile.iter().fold(0.0f64, |a, &v| a.max(v)).sqrt();
    Ok((sup, profile))
}

/// Doubles the window until the functional moves by less than the tolerance.
pub fn kato_doubling(v0: &Field, kind: PhaseKind, weight: &[RieszSpec], axis: usize, win: KatoWindow) -> Result<KatoMeasurement> {
    let norm = v0.l2_norm();
    if norm == 0.0 {
        return Err(LabError::ZeroDatum);
    }
    let mut t = win.t0;
    let mut prev = kato_functional(v0, kind, weight, axis, t)?.0;
    loop {
        let t2 = 2.0 * t;
        let cur = kato_functional(v0, kind, weight, axis, t2)?.0;
        let drift = if prev == 0.0 { f64::INFINITY } else { (cur / prev - 1.0).abs() };
        let converged = drift < win.drift_tol;
        if converged || t2 >= win.t_max {
            return Ok(KatoMeasurement { lhs: cur, norm, ratio: cur / norm, t: t2, drift, converged });
        }
        t = t2;
        prev = cur;
    }
}

/// `‖I_x U_sym v₀‖_{L^∞_x L²_{yt}}` measured against `‖v₀‖`.
pub fn kato_identity_2d(v0: &Field, win: KatoWindow) -> Result<KatoMeasurement> {
    check_dim(v0, 2)?;
    kato_doubling(v0, PhaseKind::Sym2d, &[RieszSpec::new(RieszOp::Ix, 1.0)], 0, win)
}

/// The companion identity with the roles of `x` and `y` exchanged.
pub fn kato_y_2d(v0: &Field, win: KatoWindow) -> Result<KatoMeasurement> {
    check_dim(v0, 2)?;
    kato_doubling(v0, PhaseKind::Sym2d, &[RieszSpec::new(RieszOp::Iy, 1.0)], 1, win)
}

/// Full-gradient smoothing for the 2D ZK group.
pub fn kato_fullgradient_2d(u0: &Field, win: KatoWindow) -> Result<KatoMeasurement> {
    check_dim(u0, 2)?;
    kato_doubling(u0, PhaseKind::Zk2d, &[RieszSpec::new(RieszOp::I, 1.0)], 0, win)
}

pub fn kato_3d(u0: &Field, win: KatoWindow) -> Result<KatoMeasurement> {
    check_dim(u0, 3)?;
    kato_doubling(u0, PhaseKind::Zk3d, &[RieszSpec::new(RieszOp::I, 1.0)], 0, win)
}

fn check_dim(f: &Field, n: usize) -> Result<()> {
    if f.grid().dim() != n {
        return Err(LabError::BadParameter(format!("expected a {n}D field, got {}D", f.grid().dim())));
    }
    Ok(())
}

/// Swaps the two axes of a 2D field.
pub fn transpose_2d(f: &Field) -> Result<Field> {
    check_dim(f, 2)?;
    let g = *f.grid();
    let m = g.points();
    let src = f.values();
    let mut out = vec![Complex64::default(); g.len()];
    for r in 0..m {
        for c in 0..m {
            out[c * m + r] = src[r * m + c];
        }
    }
    Ok(Field::new(g, out, f.rep())?)
}

fn resolution(e: &Ensemble, t: f64) -> Resolution {
    Resolution { l: e.grid.length(), m: e.grid.points(), dt: 0.0, t }
}

/// Runs `measure` over an ensemble; trial lhs is the functional, rhs `‖v₀‖`.
pub fn kato_report(id: &str, ensemble: &Ensemble, measure: impl Fn(&Field) -> Result<KatoMeasurement> + Sync) -> Result<(EstimateReport, Vec<KatoMeasurement>)> {
    use rayon::prelude::*;
    let ms: Vec<KatoMeasurement> = (0..ensemble.count)
        .into_par_iter()
        .map(|i| measure(&ensemble.datum(i)?))
        .collect::<Result<_>>()?;
    let tmax = ms.iter().fold(0.0f64, |a, m| a.max(m.t));
    let mut rep = EstimateReport::new(id, resolution(ensemble, tmax));
    for m in &ms {
        rep.push(Trial::new(m.lhs, m.norm)?);
    }
    let unconverged = ms.iter().filter(|m| !m.converged).count();
    rep.note("window_rule", "symmetric [-T, T], T doubled until relative drift < tolerance");
    rep.note("unconverged_trials", unconverged);
    Ok((rep, ms))
}

/// Identity report: the stability slot carries `max |ĉ/c − 1|`, tolerance 2%.
pub fn kato_identity_report(ensemble: &Ensemble, win: KatoWindow) -> Result<EstimateReport> {
    let (mut rep, ms) = kato_report("kato2d", ensemble, |v| kato_identity_2d(v, win))?;
    let c = kato_constant();
    let dev = ms.iter().fold(0.0f64, |a, m| a.max((m.ratio / c - 1.0).abs()));
    let (lo, hi) = ms.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), m| (lo.min(m.ratio), hi.max(m.ratio)));
    rep.stability = Some(dev);
    rep.tolerance = 0.02;
    rep.ceiling = c * 1.02;
    rep.note("c_convention", crate::report::fmt_num(c));
    rep.note("c_measured_mean", crate::report::fmt_num(rep.summary().mean));
    rep.note("c_relative_spread", crate::report::fmt_num((hi - lo) / hi.max(1e-300)));
    Ok(rep)
}
