//! Littlewood–Paley machinery on the periodic lattice.
//!
//! Bands are the sharp half-open annuli `N/2 < |κ| ≤ N`, `N = 2^j`. The band
//! window runs from the band holding the smallest nonzero wavenumber to the
//! band holding the lattice corner, so the bands plus the zero mode partition
//! every spectrum exactly.

use num_rational::Ratio;
use spectral_core::{Complex64, Field, GridSpec, Rep, SpectralError};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("band N = 2^{j} outside the resolvable window [2^{lo}, 2^{hi}]")]
    BandOutOfWindow { j: i32, lo: i32, hi: i32 },
    #[error("summation exponent q = {0} must be >= 1")]
    BadSummation(f64),
    #[error("dimension must be 2 or 3, got {0}")]
    BadDimension(usize),
    #[error("power k must be a positive integer, got {0}")]
    BadPower(i64),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

pub type Result<T> = std::result::Result<T, LpError>;

/// Dyadic number `N = 2^j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicBand {
    pub j: i32,
}

impl DyadicBand {
    pub fn new(j: i32) -> Self {
        DyadicBand { j }
    }

    /// Band with `N` equal to the given power of two (rounded to the nearest exponent).
    pub fn from_n(n: f64) -> Self {
        DyadicBand { j: n.log2().round() as i32 }
    }

    pub fn n(&self) -> f64 {
        2f64.powi(self.j)
    }

    /// Membership for `|κ|²`.
    pub fn contains_sq(&self, k2: f64) -> bool {
        let n = self.n();
        k2 > 0.25 * n * n && k2 <= n * n
    }
}

fn ceil_log2(x: f64) -> i32 {
    let mut j = x.log2().ceil() as i32;
    while 2f64.powi(j - 1) >= x {
        j -= 1;
    }
    while 2f64.powi(j) < x {
        j += 1;
    }
    j
}

/// Exponents `(lo, hi)` of the first and last band holding lattice modes.
pub fn band_window(grid: &GridSpec) -> (i32, i32) {
    let corner = (grid.dim() as f64).sqrt() * grid.kmax();
    (ceil_log2(grid.dk()), ceil_log2(corner))
}

pub fn bands(grid: &GridSpec) -> Vec<DyadicBand> {
    let (lo, hi) = band_window(grid);
    (lo..=hi).map(DyadicBand::new).collect()
}

/// Band assignment of every lattice mode, computed once per grid.
#[derive(Debug, Clone)]
pub struct BandLayout {
    grid: GridSpec,
    lo: i32,
    hi: i32,
    slot: Vec<u16>,
}

/// Marker in [`BandLayout`] for the zero mode.
const ZERO: u16 = u16::MAX;

impl BandLayout {
    pub fn new(grid: &GridSpec) -> Self {
        let (lo, hi) = band_window(grid);
        let n = grid.dim();
        let slot = (0..grid.len())
            .map(|i| {
                let k = grid.kappa(i);
                let k2: f64 = k[..n].iter().map(|v| v * v).sum();
                if k2 == 0.0 {
                    return ZERO;
                }
                let mut j = ceil_log2(k2.sqrt());
                // settle ties against the squared comparison used everywhere else
                while !DyadicBand::new(j).contains_sq(k2) {
                    if k2 > 2f64.powi(2 * j) {
                        j += 1;
                    } else {
                        j -= 1;
                    }
                }
                (j.clamp(lo, hi) - lo) as u16
            })
            .collect();
        BandLayout { grid: *grid, lo, hi, slot }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn bands(&self) -> Vec<DyadicBand> {
        (self.lo..=self.hi).map(DyadicBand::new).collect()
    }

    pub fn count(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn window(&self) -> (i32, i32) {
        (self.lo, self.hi)
    }

    /// Position of `band` in [`Self::bands`].
    pub fn position(&self, band: DyadicBand) -> Result<usize> {
        if band.j < self.lo || band.j > self.hi {
            return Err(LpError::BandOutOfWindow { j: band.j, lo: self.lo, hi: self.hi });
        }
        Ok((band.j - self.lo) as usize)
    }

    /// Band position of a flat spectral index, `None` for the zero mode.
    pub fn band_of(&self, flat: usize) -> Option<usize> {
        match self.slot[flat] {
            ZERO => None,
            s => Some(s as usize),
        }
    }

    /// Indicator table of one band in FFT order.
    pub fn mask(&self, band: DyadicBand) -> Result<Vec<f64>> {
        let p = self.position(band)? as u16;
        Ok(self.slot.iter().map(|&s| if s == p { 1.0 } else { 0.0 }).collect())
    }

    pub fn project(&self, f: &Field, band: DyadicBand) -> Result<Field> {
        let p = self.position(band)? as u16;
        let mut g = f.to_frequency();
        for (v, &s) in g.values_mut().iter_mut().zip(&self.slot) {
            if s != p {
                *v = Complex64::default();
            }
        }
        Ok(g)
    }

    /// `‖P_N f‖_{L²}` for every band in one pass.
    pub fn band_norms(&self, f: &Field) -> Vec<f64> {
        let g = f.to_frequency();
        let mut acc = vec![0.0; self.count()];
        for (v, &s) in g.values().iter().zip(&self.slot) {
            if s != ZERO {
                acc[s as usize] += v.norm_sqr();
            }
        }
        let w = self.grid.length().powi(-(self.grid.dim() as i32));
        acc.into_iter().map(|a| (a * w).sqrt()).collect()
    }

    /// All band projections, frequency rep.
    pub fn split(&self, f: &Field) -> Vec<Field> {
        let g = f.to_frequency();
        let mut out = vec![Field::zeros(self.grid, Rep::Frequency); self.count()];
        for (i, (&v, &s)) in g.values().iter().zip(&self.slot).enumerate() {
            if s != ZERO {
                out[s as usize].values_mut()[i] = v;
            }
        }
        out
    }
}

pub fn project_band(f: &Field, band: DyadicBand) -> Result<Field> {
    BandLayout::new(f.grid()).project(f, band)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovParams {
    pub s: f64,
    pub q: f64,
}

impl BesovParams {
    pub fn new(s: f64, q: f64) -> Result<Self> {
        if !(q >= 1.0) {
            return Err(LpError::BadSummation(q));
        }
        Ok(BesovParams { s, q })
    }
}

/// `(Σ a_i^q)^{1/q}`, max for `q = ∞`. Scaled by the largest entry to avoid
/// overflow for large `q`.
pub fn lq_norm(values: &[f64], q: f64) -> f64 {
    let top = values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    if top == 0.0 {
        return 0.0;
    }
    if q.is_infinite() {
        return top;
    }
    top * values.iter().map(|v| (v.abs() / top).powf(q)).sum::<f64>().powf(1.0 / q)
}

fn warn_mean(f: &Field) {
    let m = f.mean_mode();
    if m.norm() > 1e-12 * f.l2_norm().max(f64::MIN_POSITIVE) * f.grid().length().powf(f.grid().dim() as f64 / 2.0) {
        log::warn!("field has a nonzero mean ({m}); the zero mode is ignored");
    }
}

/// Weighted band sequence `N^s ‖P_N f‖` over the whole window.
pub fn o_space_profile(f: &Field, s: f64) -> Vec<(f64, f64)> {
    let layout = BandLayout::new(f.grid());
    profile_with(&layout, f, s)
}

pub fn profile_with(layout: &BandLayout, f: &Field, s: f64) -> Vec<(f64, f64)> {
    layout
        .bands()
        .into_iter()
        .zip(layout.band_norms(f))
        .map(|(b, v)| (b.n(), b.n().powf(s) * v))
        .collect()
}

pub fn besov_norm(f: &Field, prm: BesovParams) -> Result<f64> {
    BesovParams::new(prm.s, prm.q)?;
    warn_mean(f);
    let prof = o_space_profile(f, prm.s);
    let vals: Vec<f64> = prof.iter().map(|p| p.1).collect();
    Ok(lq_norm(&vals, prm.q))
}

pub fn besov_norm_with(layout: &BandLayout, f: &Field, prm: BesovParams) -> Result<f64> {
    BesovParams::new(prm.s, prm.q)?;
    let vals: Vec<f64> = profile_with(layout, f, prm.s).iter().map(|p| p.1).collect();
    Ok(lq_norm(&vals, prm.q))
}

/// `‖ |κ|^s f̂ ‖` with the zero mode dropped.
pub fn sobolev_homog_norm(f: &Field, s: f64) -> f64 {
    warn_mean(f);
    let g = f.to_frequency();
    let grid = f.grid();
    let n = grid.dim();
    let sum: f64 = g
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let k = grid.kappa(i);
            let k2: f64 = k[..n].iter().map(|x| x * x).sum();
            if k2 == 0.0 {
                0.0
            } else {
                k2.powf(s) * v.norm_sqr()
            }
        })
        .sum();
    (sum * grid.length().powi(-(n as i32))).sqrt()
}

/// Profile as CSV with header `N, weighted_band_norm`.
pub fn profile_csv(profile: &[(f64, f64)]) -> String {
    let mut s = String::from("N, weighted_band_norm\n");
    for (n, v) in profile {
        s.push_str(&format!("{n:.15e}, {v:.15e}\n"));
    }
    s
}

/// `n/2 − 2/k` as an exact rational.
pub fn critical_index_exact(n: usize, k: i64) -> Result<Ratio<i64>> {
    if n != 2 && n != 3 {
        return Err(LpError::BadDimension(n));
    }
    if k < 1 {
        return Err(LpError::BadPower(k));
    }
    Ok(Ratio::new(n as i64, 2) - Ratio::new(2, k))
}

pub fn critical_index(n: usize, k: i64) -> Result<f64> {
    let r = critical_index_exact(n, k)?;
    Ok(*r.numer() as f64 / *r.denom() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn critical_values() {
        assert_eq!(critical_index(2, 3).unwrap(), 1.0 / 3.0);
        assert_eq!(critical_index(2, 4).unwrap(), 0.5);
        assert_eq!(critical_index(3, 3).unwrap(), 5.0 / 6.0);
        assert!(critical_index(4, 3).is_err());
        assert!(critical_index(2, 0).is_err());
    }

    #[test]
    fn window_covers_lattice() {
        let g = GridSpec::new(2, 2.0 * PI, 16).unwrap();
        assert_eq!(band_window(&g), (0, 4));
        let g = GridSpec::new(3, 32.0 * PI, 64).unwrap();
        let (lo, hi) = band_window(&g);
        assert_eq!(lo, -4);
        assert!(2f64.powi(hi) >= 3f64.sqrt() * g.kmax());
    }

    #[test]
    fn plane_wave_band() {
        let g = GridSpec::new(2, 4.0 * PI, 16).unwrap();
        // modes (3, 0) → |κ| = 1.5
        let f = Field::plane_wave(g, &[3, 0], Complex64::new(1.0, 0.0));
        let lay = BandLayout::new(&g);
        for b in lay.bands() {
            let p = lay.project(&f, b).unwrap();
            if b.j == 1 {
                assert!((p.l2_norm() - f.l2_norm()).abs() < 1e-12 * f.l2_norm());
            } else {
                assert!(p.l2_norm() < 1e-12);
            }
        }
        assert!(matches!(lay.project(&f, DyadicBand::new(30)), Err(LpError::BandOutOfWindow { .. })));
    }

    #[test]
    fn single_band_besov() {
        let g = GridSpec::new(2, 2.0 * PI, 16).unwrap();
        let f = Field::plane_wave(g, &[2, 0], Complex64::new(1.0 / (2.0 * PI), 0.0));
        assert!((f.l2_norm() - 1.0).abs() < 1e-13);
        for q in [1.0, 2.0, 3.5, f64::INFINITY] {
            let b = besov_norm(&f, BesovParams::new(0.5, q).unwrap()).unwrap();
            assert!((b - 2f64.sqrt()).abs() < 1e-12);
        }
        assert!((sobolev_homog_norm(&f, 1.0) - 2.0).abs() < 1e-12);
        assert!(BesovParams::new(0.0, 0.5).is_err());
    }

    #[test]
    fn lq_edge_cases() {
        assert_eq!(lq_norm(&[], 2.0), 0.0);
        assert_eq!(lq_norm(&[3.0, 4.0], 2.0), 5.0);
        assert_eq!(lq_norm(&[3.0, -4.0], f64::INFINITY), 4.0);
        assert!(lq_norm(&[1e300, 1e300], 4.0).is_finite());
    }

    #[test]
    fn profile_csv_header() {
        let s = profile_csv(&[(1.0, 0.5)]);
        assert!(s.starts_with("N, weighted_band_norm\n"));
    }
}
