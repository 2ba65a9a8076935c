//! Seeded data generators. Every datum is a pure function of
//! `(seed, trial index, recipe)` and the grid it is sampled on.

use crate::{LabError, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use spectral_core::{Complex64, Field, GridSpec, Rep};

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// One step of the splitmix64 sequence.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `i`: the `(i+1)`-th splitmix output from `master`.
pub fn trial_seed(master: u64, i: usize) -> u64 {
    let mut s = master.wrapping_add(GAMMA.wrapping_mul(i as u64));
    splitmix64(&mut s)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Recipe {
    /// Gaussian bump with per-axis widths drawn from `sigma`, centre offsets in
    /// `[-shift, shift]`; when `xi.1 > 0` it is modulated by `sin(ξ₀(x − c))`
    /// with `ξ₀` drawn from `xi`, which makes it odd in `x` and mean-free.
    Gaussian { sigma: (f64, f64), xi: (f64, f64), shift: f64 },
    /// Random Gaussian coefficients on the annulus `N/2 < |κ| ≤ N`, real field.
    Band { n: f64 },
    /// Complex coefficients on the part of the annulus with `ξ > 0`.
    HalfBand { n: f64 },
    /// Sum of independent [`Recipe::Band`] pieces.
    MultiBand { ns: Vec<f64> },
    /// Random coefficients on `a ≤ |ξ| ≤ b`, `|η_i| ≤ eta`, multiplied in space
    /// by a Gaussian envelope of width `envelope`; real, mean removed.
    Packet { xi: (f64, f64), eta: f64, envelope: f64 },
}

#[derive(Debug, Clone)]
pub struct Ensemble {
    pub seed: u64,
    pub count: usize,
    pub recipe: Recipe,
    pub grid: GridSpec,
}

impl Ensemble {
    pub fn new(seed: u64, count: usize, recipe: Recipe, grid: GridSpec) -> Self {
        Ensemble { seed, count, recipe, grid }
    }

    /// Same data family on another grid (used for resolution studies).
    pub fn on_grid(&self, grid: GridSpec) -> Self {
        Ensemble { grid, ..self.clone() }
    }

    pub fn with_count(&self, count: usize) -> Self {
        Ensemble { count, ..self.clone() }
    }

    /// Trial `i`, normalized to unit `L²`.
    pub fn datum(&self, i: usize) -> Result<Field> {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(self.seed, i));
        let f = generate(&self.recipe, &self.grid, &mut rng)?;
        let nrm = f.l2_norm();
        if !(nrm > 0.0) || !nrm.is_finite() {
            return Err(LabError::ZeroDatum);
        }
        Ok(f.scale(Complex64::new(1.0 / nrm, 0.0)))
    }
}

fn normal(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Visits every signed mode tuple in `[-cap, cap]^n` in lexicographic order.
fn for_modes(n: usize, cap: i64, mut f: impl FnMut(&[i64])) {
    let mut m = vec![-cap; n];
    loop {
        f(&m);
        let mut d = n;
        loop {
            if d == 0 {
                return;
            }
            d -= 1;
            if m[d] < cap {
                m[d] += 1;
                break;
            }
            m[d] = -cap;
        }
    }
}

fn slot_of(grid: &GridSpec, m: &[i64]) -> Option<usize> {
    let half = (grid.points() / 2) as i64;
    let mut idx = [0usize; 3];
    for (a, &v) in m.iter().enumerate() {
        // the Nyquist line has no symmetric partner; leave it empty
        if v.abs() >= half {
            return None;
        }
        idx[a] = grid.mode_slot(v)?;
    }
    Some(grid.flatten(&idx[..m.len()]))
}

/// Random coefficients on the modes accepted by `keep`, optionally made
/// Hermitian. Draw order depends only on the mode range, not on `M`.
fn random_spectrum(
    grid: &GridSpec,
    kmax: f64,
    rng: &mut ChaCha8Rng,
    hermitian: bool,
    keep: impl Fn(&[f64]) -> bool,
) -> Field {
    let n = grid.dim();
    let dk = grid.dk();
    let cap = (kmax / dk).floor() as i64;
    let mut vals = vec![Complex64::default(); grid.len()];
    let mut draws: Vec<(Vec<i64>, Complex64)> = Vec::new();
    for_modes(n, cap, |m| {
        let c = normal(rng);
        let k: Vec<f64> = m.iter().map(|&v| v as f64 * dk).collect();
        if keep(&k) {
            draws.push((m.to_vec(), c));
        }
    });
    for (m, c) in &draws {
        if let Some(s) = slot_of(grid, m) {
            vals[s] += if hermitian { 0.5 * c } else { *c };
        }
        if hermitian {
            let neg: Vec<i64> = m.iter().map(|v| -v).collect();
            if let Some(s) = slot_of(grid, &neg) {
                vals[s] += 0.5 * c.conj();
            }
        }
    }
    Field::new(*grid, vals, Rep::Frequency).expect("sized to grid")
}

fn annulus(n: f64) -> impl Fn(&[f64]) -> bool {
    move |k: &[f64]| {
        let k2: f64 = k.iter().map(|v| v * v).sum();
        k2 > 0.25 * n * n && k2 <= n * n
    }
}

fn generate(recipe: &Recipe, grid: &GridSpec, rng: &mut ChaCha8Rng) -> Result<Field> {
    let n = grid.dim();
    match recipe {
        Recipe::Gaussian { sigma, xi, shift } => {
            let sig: Vec<f64> = (0..n).map(|_| rng.random_range(sigma.0..=sigma.1)).collect();
            let c: Vec<f64> = (0..n).map(|_| if *shift > 0.0 { rng.random_range(-shift..=*shift) } else { 0.0 }).collect();
            let xi0 = if xi.1 > 0.0 { rng.random_range(xi.0..=xi.1) } else { 0.0 };
            Ok(Field::from_real_fn(*grid, |x| {
                let e: f64 = (0..n).map(|a| (x[a] - c[a]).powi(2) / (2.0 * sig[a] * sig[a])).sum();
                let m = if xi0 > 0.0 { (xi0 * (x[0] - c[0])).sin() } else { 1.0 };
                m * (-e).exp()
            }))
        }
        Recipe::Band { n: nn } => Ok(random_spectrum(grid, *nn, rng, true, annulus(*nn))),
        Recipe::HalfBand { n: nn } => {
            let ring = annulus(*nn);
            Ok(random_spectrum(grid, *nn, rng, false, move |k| k[0] > 0.0 && ring(k)))
        }
        Recipe::MultiBand { ns } => {
            let mut acc = Field::zeros(*grid, Rep::Frequency);
            for &nn in ns {
                let piece = random_spectrum(grid, nn, rng, true, annulus(nn));
                let w = piece.l2_norm();
                if w > 0.0 {
                    acc = acc.add(&piece.scale(Complex64::new(1.0 / w, 0.0)))?;
                }
            }
            Ok(acc)
        }
        Recipe::Packet { xi, eta, envelope } => {
            let (a, b, e) = (xi.0, xi.1, *eta);
            let kmax = (b * b + (n - 1) as f64 * e * e).sqrt();
            let box_ = random_spectrum(grid, kmax, rng, true, move |k| {
                let x = k[0].abs();
                x >= a && x <= b && k[1..].iter().all(|v| v.abs() <= e)
            });
            let env = *envelope;
            let space = box_.to_space();
            let mut shaped = Field::from_real_fn(*grid, |x| {
                let r2: f64 = x.iter().take(n).map(|v| v * v).sum();
                (-r2 / (2.0 * env * env)).exp()
            });
            for (s, v) in shaped.values_mut().iter_mut().zip(space.values()) {
                *s = Complex64::new(s.re * v.re, 0.0);
            }
            let mut spec = shaped.to_frequency();
            spec.values_mut()[0] = Complex64::default();
            Ok(spec)
        }
    }
}
