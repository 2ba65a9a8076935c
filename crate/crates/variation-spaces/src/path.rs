use crate::{Result, VariationError};
use littlewood_paley::BandLayout;
use propagators::{PhaseKind, Propagator};
use spectral_core::{Complex64, FieldPath};

/// Times with vector values; `‖v‖² = weight · Σ|v_i|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    times: Vec<f64>,
    values: Vec<Vec<Complex64>>,
    weight: f64,
}

impl SampledPath {
    pub fn new(times: Vec<f64>, values: Vec<Vec<Complex64>>, weight: f64) -> Result<Self> {
        if times.is_empty() {
            return Err(VariationError::EmptyPath);
        }
        if times.len() != values.len() {
            return Err(VariationError::CountMismatch { expected: times.len(), got: values.len() });
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(VariationError::NotIncreasing);
        }
        if values.iter().any(|v| v.len() != values[0].len()) {
            return Err(VariationError::RaggedValues);
        }
        Ok(SampledPath { times, values, weight })
    }

    /// Real scalar path sampled at `0, 1, 2, …`.
    pub fn scalar(values: &[f64]) -> Result<Self> {
        let times = (0..values.len()).map(|i| i as f64).collect();
        Self::new(times, values.iter().map(|&v| vec![Complex64::new(v, 0.0)]).collect(), 1.0)
    }

    /// Snapshots as spectra, measured in `L²` through Parseval.
    pub fn from_field_path(u: &FieldPath) -> Self {
        let g = u.grid();
        SampledPath {
            times: (0..=u.steps()).map(|j| u.time(j)).collect(),
            values: u.snapshots().iter().map(|s| s.to_frequency().into_values()).collect(),
            weight: g.length().powi(-(g.dim() as i32)),
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Vec<Complex64>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn norm_at(&self, i: usize) -> f64 {
        (self.weight * self.values[i].iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let s: f64 = self.values[i].iter().zip(&self.values[j]).map(|(a, b)| (a - b).norm_sqr()).sum();
        (self.weight * s).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        (0..self.len()).map(|i| self.norm_at(i)).fold(0.0, f64::max)
    }

    /// Keeps the samples at the given (increasing) indices.
    pub fn select(&self, idx: &[usize]) -> Result<Self> {
        Self::new(idx.iter().map(|&i| self.times[i]).collect(), idx.iter().map(|&i| self.values[i].clone()).collect(), self.weight)
    }
}

/// Exact `sup_P (Σ d(t_{k−1}, t_k)^p)^{1/p}` over sub-partitions of `0..len`,
/// by dynamic programming on the last selected index. Sums run left to right.
pub fn p_variation_from_distances(len: usize, p: f64, d: impl Fn(usize, usize) -> f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(VariationError::BadExponent(p));
    }
    if p.is_infinite() {
        let mut best = 0.0f64;
        for i in 0..len {
            for j in 0..i {
                best = best.max(d(j, i));
            }
        }
        return Ok(best);
    }
    let mut best = vec![0.0f64; len];
    let mut top = 0.0f64;
    for i in 1..len {
        let mut b = 0.0f64;
        for j in 0..i {
            b = b.max(best[j] + d(j, i).powf(p));
        }
        best[i] = b;
        top = top.max(b);
    }
    Ok(top.powf(1.0 / p))
}

pub fn p_variation(v: &SampledPath, p: f64) -> Result<f64> {
    if v.is_empty() {
        return Err(VariationError::EmptyPath);
    }
    let n = v.len();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..i {
            dist[j * n + i] = v.distance(j, i);
        }
    }
    p_variation_from_distances(n, p, |j, i| dist[j * n + i])
}

/// `max(sup_t ‖v(t)‖, ω_p(v))`.
pub fn vp_norm(v: &SampledPath, p: f64) -> Result<f64> {
    Ok(v.sup_norm().max(p_variation(v, p)?))
}

/// `U_φ(−t_j) u(t_j)` as a sampled path in `L²`.
pub fn pulled_back(u: &FieldPath, kind: PhaseKind) -> Result<SampledPath> {
    let prop = Propagator::new(kind, u.grid())?;
    let g = u.grid();
    let values = u
        .snapshots()
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let mut v = s.to_frequency().into_values();
            prop.evolve_in_place(&mut v, -u.time(j));
            v
        })
        .collect();
    Ok(SampledPath { times: (0..=u.steps()).map(|j| u.time(j)).collect(), values, weight: g.length().powi(-(g.dim() as i32)) })
}

/// `‖u‖_{V^p_φ} = ‖U_φ(−·)u‖_{V^p}`.
pub fn phase_adapted_vp(u: &FieldPath, p: f64, kind: PhaseKind) -> Result<f64> {
    vp_norm(&pulled_back(u, kind)?, p)
}

/// `‖P_N v‖_{V^p}` for every band at once, `v` a path of spectra on the
/// layout's grid. Pair distances are accumulated per band in one sweep.
pub fn banded_vp_norms(v: &SampledPath, layout: &BandLayout, p: f64) -> Result<Vec<f64>> {
    let nb = layout.count();
    let n = v.len();
    let slots: Vec<Option<usize>> = (0..layout.grid().len()).map(|i| layout.band_of(i)).collect();
    let mut dist = vec![0.0f64; nb * n * n];
    let mut sup = vec![0.0f64; nb];
    let mut acc = vec![0.0f64; nb];
    for i in 0..n {
        acc.iter_mut().for_each(|a| *a = 0.0);
        for (val, s) in v.values[i].iter().zip(&slots) {
            if let Some(b) = s {
                acc[*b] += val.norm_sqr();
            }
        }
        for b in 0..nb {
            sup[b] = sup[b].max((v.weight * acc[b]).sqrt());
        }
        for j in 0..i {
            acc.iter_mut().for_each(|a| *a = 0.0);
            for ((a, c), s) in v.values[i].iter().zip(&v.values[j]).zip(&slots) {
                if let Some(b) = s {
                    acc[*b] += (a - c).norm_sqr();
                }
            }
            for b in 0..nb {
                dist[(b * n + j) * n + i] = (v.weight * acc[b]).sqrt();
            }
        }
    }
    (0..nb)
        .map(|b| Ok(sup[b].max(p_variation_from_distances(n, p, |j, i| dist[(b * n + j) * n + i])?)))
        .collect()
}
