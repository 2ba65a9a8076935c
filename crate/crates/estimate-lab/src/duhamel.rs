//! Duhamel integrals `∫_0^t U(t − s) ∂ g(s) ds` by exponential trapezoid
//! (Filon-type: linear interpolation of `g`, exact oscillation), and the
//! phase-adapted `Ẋ^s_q` norm of the result.

use crate::{LabError, Result};
use littlewood_paley::{lq_norm, BandLayout};
use propagators::{PhaseKind, Propagator};
use spectral_core::{Complex64, Field, FieldPath, GridSpec, Rep};
use variation_spaces::{banded_vp_norms, pulled_back};

/// Spatial derivative applied to the forcing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Derivative {
    Dx,
    Dy,
    /// `c(∂_x + ∂_y)`, the symmetrized frame.
    DxPlusDy(f64),
    /// No derivative.
    Identity,
}

pub fn derivative_table(grid: &GridSpec, d: Derivative) -> Result<Vec<Complex64>> {
    if matches!(d, Derivative::Dy | Derivative::DxPlusDy(_)) && grid.dim() < 2 {
        return Err(LabError::BadParameter("∂_y needs a transverse axis".into()));
    }
    Ok((0..grid.len())
        .map(|i| {
            let k = grid.kappa(i);
            match d {
                Derivative::Dx => Complex64::new(0.0, k[0]),
                Derivative::Dy => Complex64::new(0.0, k[1]),
                Derivative::DxPlusDy(c) => Complex64::new(0.0, c * (k[0] + k[1])),
                Derivative::Identity => Complex64::new(1.0, 0.0),
            }
        })
        .collect())
}

/// `(E₁, E_u) = (∫_0^1 e^{izu} du, ∫_0^1 u e^{izu} du)`.
pub fn filon_coefficients(z: f64) -> (Complex64, Complex64) {
    let iz = Complex64::new(0.0, z);
    if z.abs() < 0.1 {
        // Σ (iz)^n/(n+1)! and Σ (iz)^n/(n!(n+2))
        let (mut e1, mut eu) = (Complex64::default(), Complex64::default());
        let mut term = Complex64::new(1.0, 0.0); // (iz)^n / n!
        for n in 0..12 {
            e1 += term / (n + 1) as f64;
            eu += term / (n + 2) as f64;
            term = term * iz / (n + 1) as f64;
        }
        return (e1, eu);
    }
    let e = iz.exp();
    let e1 = (e - 1.0) / iz;
    let eu = e / iz + (e - 1.0) / (z * z);
    (e1, eu)
}

/// `D(t_m) = ∫_0^{t_m} U(t_m − s) ∂ g(s) ds` on the nodes of `g`. Exact for
/// `g` piecewise linear in time; frequency rep out.
pub fn duhamel(prop: &Propagator, deriv: Derivative, g: &FieldPath) -> Result<FieldPath> {
    let grid = *g.grid();
    if *prop.grid() != grid {
        return Err(LabError::BadParameter("propagator and forcing live on different grids".into()));
    }
    let dt = g.dt();
    let dtab = derivative_table(&grid, deriv)?;
    let coef: Vec<(Complex64, Complex64, Complex64)> = prop
        .phase()
        .iter()
        .map(|&p| {
            let z = p * dt;
            let (e1, eu) = filon_coefficients(z);
            (Complex64::from_polar(1.0, z), dt * eu, dt * (e1 - eu))
        })
        .collect();
    let spectra: Vec<Vec<Complex64>> = g
        .snapshots()
        .iter()
        .map(|s| s.to_frequency().into_values().into_iter().zip(&dtab).map(|(v, d)| v * d).collect())
        .collect();
    let mut d = vec![Complex64::default(); grid.len()];
    let mut out = vec![Field::zeros(grid, Rep::Frequency)];
    for w in spectra.windows(2) {
        for (i, v) in d.iter_mut().enumerate() {
            let (e, a, b) = coef[i];
            *v = e * *v + a * w[0][i] + b * w[1][i];
        }
        out.push(Field::new(grid, d.clone(), Rep::Frequency)?);
    }
    Ok(FieldPath::new(dt, out)?)
}

/// `(N, N^s ‖P_N u‖_{V²_φ})` over the bands of the grid.
pub fn xdot_profile(u: &FieldPath, kind: PhaseKind, s: f64) -> Result<Vec<(f64, f64)>> {
    let layout = BandLayout::new(u.grid());
    let norms = banded_vp_norms(&pulled_back(u, kind)?, &layout, 2.0)?;
    Ok(layout.bands().iter().zip(norms).map(|(b, v)| (b.n(), b.n().powf(s) * v)).collect())
}

/// `‖u‖_{Ẋ^s_q} = ‖(N^s ‖P_N u‖_{V²_φ})_N‖_{ℓ^q}`.
pub fn xdot_norm(u: &FieldPath, kind: PhaseKind, s: f64, q: f64) -> Result<f64> {
    let vals: Vec<f64> = xdot_profile(u, kind, s)?.into_iter().map(|(_, v)| v).collect();
    Ok(lq_norm(&vals, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filon_branches_agree() {
        for z in [0.0999999, 0.1, 0.10000001, -0.1] {
            let (a, b) = filon_coefficients(z);
            let (c, d) = filon_coefficients(z + 1e-9);
            assert!((a - c).norm() < 1e-8 && (b - d).norm() < 1e-8, "{z}");
        }
        let (e1, eu) = filon_coefficients(0.0);
        assert_eq!((e1.re, eu.re), (1.0, 0.5));
        let (e1, eu) = filon_coefficients(std::f64::consts::PI);
        assert!((e1 - Complex64::new(0.0, 2.0 / std::f64::consts::PI)).norm() < 1e-15);
        assert!((eu.re + 2.0 / (std::f64::consts::PI.powi(2))).abs() < 1e-15);
    }

    #[test]
    fn stationary_forcing_is_exact() {
        // g constant: D(t) = (e^{itφ} − 1)/(iφ) ∂g
        let grid = GridSpec::new(2, 8.0, 16).unwrap();
        let g0 = Field::plane_wave(grid, &[1, -2], Complex64::new(0.3, 0.1));
        let path = FieldPath::sample(1.3, 7, |_| g0.clone()).unwrap();
        let prop = Propagator::new(PhaseKind::Zk2d, &grid).unwrap();
        let d = duhamel(&prop, Derivative::Dx, &path).unwrap();
        let slot = grid.flatten(&[grid.mode_slot(1).unwrap(), grid.mode_slot(-2).unwrap()]);
        let k = grid.kappa(slot);
        let phi = prop.phase()[slot];
        let g_hat = g0.to_frequency().values()[slot] * Complex64::new(0.0, k[0]);
        for j in 0..=7 {
            let t = d.time(j);
            let want = ((Complex64::new(0.0, t * phi)).exp() - 1.0) / Complex64::new(0.0, phi) * g_hat;
            assert!((d.snapshots()[j].values()[slot] - want).norm() < 1e-12 * g_hat.norm().max(1.0));
        }
    }

    #[test]
    fn free_path_has_single_band_xdot() {
        let grid = GridSpec::new(2, 2.0 * std::f64::consts::PI, 16).unwrap();
        let v = Field::plane_wave(grid, &[3, 0], Complex64::new(1.0, 0.0));
        let prop = Propagator::new(PhaseKind::Sym2d, &grid).unwrap();
        let path = FieldPath::sample(0.5, 5, |t| prop.evolve(&v, t).unwrap()).unwrap();
        let prof = xdot_profile(&path, PhaseKind::Sym2d, 0.0).unwrap();
        let live: Vec<_> = prof.iter().filter(|(_, v)| *v > 1e-12).collect();
        assert_eq!(live.len(), 1);
        assert!((live[0].1 - v.l2_norm()).abs() < 1e-12);
        assert!((xdot_norm(&path, PhaseKind::Sym2d, 0.0, 2.0).unwrap() - v.l2_norm()).abs() < 1e-12);
    }
}
