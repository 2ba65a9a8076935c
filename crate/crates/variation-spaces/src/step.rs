use crate::path::{vp_norm, SampledPath};
use crate::{conjugate, Result, VariationError};
use spectral_core::Complex64;

/// `t₀ < … < t_K`, the last point possibly `+∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    times: Vec<f64>,
}

impl Partition {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(VariationError::CountMismatch { expected: 2, got: times.len() });
        }
        let finite_prefix = times[..times.len() - 1].iter().all(|t| t.is_finite());
        if !finite_prefix || times.windows(2).any(|w| !(w[0] < w[1])) || times[0].is_nan() {
            return Err(VariationError::NotIncreasing);
        }
        Ok(Partition { times })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Number of intervals `K`.
    pub fn intervals(&self) -> usize {
        self.times.len() - 1
    }
}

/// Right-continuous `Σ_k χ_{[t_{k−1}, t_k)} ψ_k`, zero outside `[t₀, t_K)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepPath {
    partition: Partition,
    values: Vec<Vec<Complex64>>,
    weight: f64,
}

impl StepPath {
    pub fn new(partition: Partition, values: Vec<Vec<Complex64>>, weight: f64) -> Result<Self> {
        if values.len() != partition.intervals() {
            return Err(VariationError::CountMismatch { expected: partition.intervals(), got: values.len() });
        }
        if values.iter().any(|v| v.len() != values[0].len()) {
            return Err(VariationError::RaggedValues);
        }
        Ok(StepPath { partition, values, weight })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn values(&self) -> &[Vec<Complex64>] {
        &self.values
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    fn dim(&self) -> usize {
        self.values[0].len()
    }

    fn piece(&self, t: f64) -> Option<usize> {
        let ts = self.partition.times();
        if t < ts[0] || t >= ts[ts.len() - 1] {
            return None;
        }
        Some(ts.partition_point(|&s| s <= t) - 1)
    }

    /// Right-continuous value, zero outside the support.
    pub fn eval(&self, t: f64) -> Vec<Complex64> {
        match self.piece(t) {
            Some(k) => self.values[k].clone(),
            None => vec![Complex64::default(); self.dim()],
        }
    }

    /// Value with the ends held: first piece before `t₀`, last piece from `t_{K−1}` on.
    pub fn eval_clamped(&self, t: f64) -> &[Complex64] {
        let ts = self.partition.times();
        let k = ts[..ts.len() - 1].partition_point(|&s| s <= t);
        &self.values[k.saturating_sub(1)]
    }

    /// Samples `ψ_k` at `t_{k−1}`; the V^p norm of a step path is read off these.
    pub fn to_sampled(&self) -> SampledPath {
        let ts = self.partition.times();
        SampledPath::new(ts[..ts.len() - 1].to_vec(), self.values.clone(), self.weight).expect("validated partition")
    }

    pub fn norm_of(&self, v: &[Complex64]) -> f64 {
        (self.weight * v.iter().map(|x| x.norm_sqr()).sum::<f64>()).sqrt()
    }
}

/// A step path with `Σ‖ψ_k‖^p = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub path: StepPath,
    pub p: f64,
}

/// Rescales `ψs` to an exact `U^p` atom.
pub fn make_atom(partition: Partition, psis: Vec<Vec<Complex64>>, weight: f64, p: f64) -> Result<Atom> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(VariationError::BadExponent(p));
    }
    let path = StepPath::new(partition, psis, weight)?;
    let total: f64 = path.values.iter().map(|v| path.norm_of(v).powf(p)).sum();
    if total == 0.0 {
        return Err(VariationError::ZeroAtom);
    }
    let c = total.powf(-1.0 / p);
    let values = path.values.iter().map(|v| v.iter().map(|x| x * c).collect()).collect();
    Ok(Atom { path: StepPath { values, ..path }, p })
}

fn merged_times(a: &Partition, b: &Partition) -> Vec<f64> {
    let mut t: Vec<f64> = a.times().iter().chain(b.times()).copied().collect();
    t.sort_by(|x, y| x.partial_cmp(y).unwrap());
    t.dedup();
    t
}

/// `Σ|λ_j|` and the synthesized step path `Σ λ_j a_j` on the merged breakpoints.
pub fn up_norm_upper(decomposition: &[(f64, Atom)]) -> Result<(f64, StepPath)> {
    let first = &decomposition.first().ok_or(VariationError::EmptyDecomposition)?.1;
    let mut times = first.path.partition.times().to_vec();
    for (_, a) in &decomposition[1..] {
        times = merged_times(&Partition { times }, a.path.partition());
    }
    let dim = first.path.dim();
    let values = times[..times.len() - 1]
        .iter()
        .map(|&t| {
            let mut v = vec![Complex64::default(); dim];
            for (lam, a) in decomposition {
                for (x, y) in v.iter_mut().zip(a.path.eval(t)) {
                    *x += y * *lam;
                }
            }
            v
        })
        .collect();
    let bound = decomposition.iter().map(|(l, _)| l.abs()).sum();
    Ok((bound, StepPath::new(Partition::new(times)?, values, first.path.weight)?))
}

/// `B(u, v) = Σ_k ⟨u(s_{k−1}), v(s_k) − v(s_{k−1})⟩` over the merged breakpoints
/// `s_0 < … < s_L`: `u` is evaluated right-continuously (zero off its support),
/// `v` with its ends held, so a constant `u ≡ c` pairs to `⟨c, Δv⟩`.
pub fn duality_pair(u: &StepPath, v: &StepPath) -> Complex64 {
    let s: Vec<f64> = merged_times(u.partition(), v.partition()).into_iter().filter(|t| t.is_finite()).collect();
    let mut acc = Complex64::default();
    for w in s.windows(2) {
        let a = u.eval(w[0]);
        let v1 = v.eval_clamped(w[1]);
        let v0 = v.eval_clamped(w[0]);
        let inner: Complex64 = a.iter().zip(v1.iter().zip(v0)).map(|(x, (y1, y0))| x.conj() * (y1 - y0)).sum();
        acc += inner * u.weight;
    }
    acc
}

/// Duality lower bound `max_v |B(u, v)| / ‖v‖_{V^{p′}}` over the test paths.
pub fn up_norm_lower(u: &StepPath, tests: &[StepPath], p: f64) -> Result<f64> {
    let pc = conjugate(p);
    let mut best = 0.0f64;
    for v in tests {
        let n = vp_norm(&v.to_sampled(), pc)?;
        if n > 0.0 {
            best = best.max(duality_pair(u, v).norm() / n);
        }
    }
    Ok(best)
}
