//! The regularized oscillatory kernel
//! `H_ε(x, t) = ∫_ℝ e^{i(xξ + tξ³) − εξ²} |ξ|^{−1/2} dξ`.

use crate::{LabError, Result};
use spectral_core::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    /// Gauss–Legendre nodes per panel.
    pub order: usize,
    /// Largest phase increment a panel may carry.
    pub max_phase: f64,
    /// Integrand cutoff `e^{−εξ²} ≤ e^{−tail}`.
    pub tail: f64,
    pub budget: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature { order: 16, max_phase: PI, tail: 27.6, budget: 10_000_000 }
    }
}

/// Nodes and weights on `[−1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * p - pm) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn panel(f: &impl Fn(f64) -> Complex64, a: f64, b: f64, gl: &(Vec<f64>, Vec<f64>)) -> Complex64 {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    gl.0.iter().zip(&gl.1).map(|(x, w)| f(c + h * x) * (w * h)).sum()
}

/// `H_ε(x, t)`; real by the `ξ ↦ −ξ` pairing.
pub fn oscillatory_kernel(x: f64, t: f64, eps: f64, quad: &Quadrature) -> Result<Complex64> {

    if !(eps > 0.0) {
        return Err(LabError::BadParameter(format!("regularization ε = {eps} must be positive")));
    }
    let gl = gauss_legendre(quad.order);
    let theta = |xi: f64| x * xi + t * xi * xi * xi;
    // both signs at once: e^{iθ} + e^{−iθ} = 2cos θ
    let even = |xi: f64, w: f64| Complex64::new(2.0 * theta(xi).cos() * w, 0.0);
    // [0, 1] with ξ = s²: ∫ ξ^{-1/2} g dξ = 2∫ g(s²) ds
    let near_phase = x.abs() + t.abs();
    let pieces = ((near_phase / quad.max_phase).ceil() as usize).max(1);
    let mut total = Complex64::default();
    let f0 = |s: f64| {
        let xi = s * s;
        even(xi, 2.0 * (-eps * xi * xi).exp())
    };
    for p in 0..pieces {
        total += panel(&f0, p as f64 / pieces as f64, (p + 1) as f64 / pieces as f64, &gl);
    }
    let xi_max = (quad.tail / eps).sqrt();
    let f1 = |xi: f64| even(xi, (-eps * xi * xi).exp() / xi.sqrt());
    let mut a = 1.0f64;
    let mut used = pieces;
    while a < xi_max {
        // local phase rate |x + 3tξ²|, bounded over the panel by its right end
        let rate = |xi: f64| (x + 3.0 * t * xi * xi).abs();
        let mut h = (xi_max - a).min(1.0);
        loop {
            let r = rate(a).max(rate(a + h));
            if r * h <= quad.max_phase || h < 1e-12 {
                break;
            }
            h = quad.max_phase / r;
        }
        total += panel(&f1, a, a + h, &gl);
        a += h;
        used += 1;
        if used > quad.budget {
            return Err(LabError::QuadratureBudget { x, t, eps, budget: quad.budget });
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelScan {
    /// `(x, t, ε, |x|^{1/2}|H|)` for every point and ε.
    pub rows: Vec<(f64, f64, f64, f64)>,
    /// `sup |x|^{1/2}|H|` at each ε.
    pub sup: Vec<(f64, f64)>,
    /// Relative change of the weighted sup between the two smallest ε.
    pub sup_drift: f64,
    /// Largest pointwise relative change of `|H|` between the two smallest ε.
    pub point_drift: f64,
    /// Largest `|Im H| / |H|`.
    pub imag_ratio: f64,
}

impl KernelScan {
    pub fn passed(&self, tol: f64) -> bool {
        self.sup.iter().all(|(_, s)| s.is_finite()) && self.sup_drift <= tol
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("x, t, eps, weighted_modulus\n");
        for (x, t, e, v) in &self.rows {
            s.push_str(&format!("{x}, {t}, {e}, {}\n", crate::report::fmt_num(*v)));
        }
        s
    }
}

/// Evaluates `|x|^{1/2}|H_ε(x, t)|` over `xs × ts` for each ε (decreasing).
pub fn kernel_decay_scan(xs: &[f64], ts: &[f64], eps_seq: &[f64], quad: &Quadrature) -> Result<KernelScan> {
    use rayon::prelude::*;
    if eps_seq.is_empty() || xs.is_empty() || ts.is_empty() {
        return Err(LabError::BadParameter("empty kernel scan".into()));
    }
    let pts: Vec<(f64, f64, f64)> =
        eps_seq.iter().flat_map(|&e| xs.iter().flat_map(move |&x| ts.iter().map(move |&t| (x, t, e)))).collect();
    let vals: Vec<Complex64> =
        pts.par_iter().map(|&(x, t, e)| oscillatory_kernel(x, t, e, quad)).collect::<Result<_>>()?;
    let rows: Vec<_> = pts.iter().zip(&vals).map(|(&(x, t, e), h)| (x, t, e, x.abs().sqrt() * h.norm())).collect();
    let sup: Vec<(f64, f64)> = eps_seq
        .iter()
        .map(|&e| (e, rows.iter().filter(|r| r.2 == e).fold(0.0f64, |a, r| a.max(r.3))))
        .collect();
    let per = xs.len() * ts.len();
    let (sup_drift, point_drift) = if eps_seq.len() < 2 {
        (0.0, 0.0)
    } else {
        let (s0, s1) = (sup[sup.len() - 2].1, sup[sup.len() - 1].1);
        let sd = (s0 - s1).abs() / s1.max(1e-300);
        let (a, b) = (&vals[(eps_seq.len() - 2) * per..][..per], &vals[(eps_seq.len() - 1) * per..][..per]);
        (sd, a.iter().zip(b).map(|(u, v)| (u.norm() - v.norm()).abs() / v.norm().max(1e-300)).fold(0.0, f64::max))
    };
    let imag_ratio = vals.iter().map(|h| h.im.abs() / h.norm().max(1e-300)).fold(0.0, f64::max);
    Ok(KernelScan { rows, sup, sup_drift, point_drift, imag_ratio })
}
