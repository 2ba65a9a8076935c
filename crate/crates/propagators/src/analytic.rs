//! Closed-form 2D data `p(x, y)·exp(−½ xᵀAx)` and the map `Rv = v∘R₀`.

use crate::phase::{PhaseKind, Propagator};
use crate::symmetrize::SymmetrizerConstants;
use crate::{PropagatorError, Result};
use spectral_core::{Complex64, Field, GridSpec, Rep};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Polynomial `Σ c[i][j] x^i y^j` times an origin-centred Gaussian with
/// symmetric positive-definite precision matrix `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticDatum {
    precision: [[f64; 2]; 2],
    poly: Vec<Vec<f64>>,
}

fn poly_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let dx = a.len() + b.len() - 1;
    let dy = a.iter().map(Vec::len).max().unwrap_or(1) + b.iter().map(Vec::len).max().unwrap_or(1) - 1;
    let mut out = vec![vec![0.0; dy]; dx];
    for (i, ra) in a.iter().enumerate() {
        for (j, &ca) in ra.iter().enumerate() {
            if ca == 0.0 {
                continue;
            }
            for (k, rb) in b.iter().enumerate() {
                for (l, &cb) in rb.iter().enumerate() {
                    out[i + k][j + l] += ca * cb;
                }
            }
        }
    }
    out
}

fn poly_pow(base: &[Vec<f64>], e: usize) -> Vec<Vec<f64>> {
    let mut acc = vec![vec![1.0]];
    for _ in 0..e {
        acc = poly_mul(&acc, base);
    }
    acc
}

impl AnalyticDatum {
    pub fn new(precision: [[f64; 2]; 2], poly: Vec<Vec<f64>>) -> Result<Self> {
        let [[a, b], [c, d]] = precision;
        let finite = precision.iter().flatten().all(|v| v.is_finite()) && poly.iter().flatten().all(|v| v.is_finite());
        if !finite {
            return Err(PropagatorError::NotInFamily("non-finite parameters".into()));
        }
        if (b - c).abs() > 1e-12 * (b.abs() + c.abs()).max(1.0) {
            return Err(PropagatorError::NotInFamily("precision matrix not symmetric".into()));
        }
        if !(a > 0.0 && a * d - b * c > 0.0) {
            return Err(PropagatorError::NotInFamily("precision matrix not positive definite".into()));
        }
        if poly.is_empty() || poly.iter().all(|r| r.is_empty()) {
            return Err(PropagatorError::NotInFamily("empty polynomial".into()));
        }
        Ok(AnalyticDatum { precision, poly })
    }

    /// `exp(−(x² + y²)/(2σ²))`.
    pub fn isotropic_gaussian(sigma: f64) -> Result<Self> {
        let p = 1.0 / (sigma * sigma);
        Self::new([[p, 0.0], [0.0, p]], vec![vec![1.0]])
    }

    pub fn precision(&self) -> [[f64; 2]; 2] {
        self.precision
    }

    pub fn poly(&self) -> &[Vec<f64>] {
        &self.poly
    }

    /// Same Gaussian with the polynomial multiplied by `q`.
    pub fn times_poly(&self, q: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(self.precision, poly_mul(&self.poly, &q))
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let [[a, b], [_, d]] = self.precision;
        let g = (-0.5 * (a * x * x + 2.0 * b * x * y + d * y * y)).exp();
        let mut p = 0.0;
        let mut xp = 1.0;
        for row in &self.poly {
            let mut yp = 1.0;
            for &c in row {
                p += c * xp * yp;
                yp *= y;
            }
            xp *= x;
        }
        p * g
    }

    pub fn sample(&self, grid: &GridSpec) -> Result<Field> {
        if grid.dim() != 2 {
            return Err(PropagatorError::NotTwoDimensional);
        }
        Ok(Field::from_real_fn(*grid, |x| self.eval(x[0], x[1])))
    }

    /// `v∘M` for a linear map `M` given by rows.
    pub fn compose_linear(&self, m: [[f64; 2]; 2]) -> Result<Self> {
        let a = self.precision;
        // Mᵀ A M
        let mut p = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                p[i][j] = (0..2).flat_map(|k| (0..2).map(move |l| (k, l))).map(|(k, l)| m[k][i] * a[k][l] * m[l][j]).sum();
            }
        }
        let sym = 0.5 * (p[0][1] + p[1][0]);
        p[0][1] = sym;
        p[1][0] = sym;
        let lx = vec![vec![0.0, m[0][1]], vec![m[0][0]]];
        let ly = vec![vec![0.0, m[1][1]], vec![m[1][0]]];
        let mut poly = vec![vec![0.0]];
        for (i, row) in self.poly.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                let term = poly_mul(&poly_pow(&lx, i), &poly_pow(&ly, j));
                poly = poly_add(&poly, &term, c);
            }
        }
        Self::new(p, poly)
    }

    /// `Rv = v∘R₀` (forward) or `v∘R₀⁻¹` (inverse).
    pub fn apply_r(&self, dir: Direction) -> Result<Self> {
        let c = SymmetrizerConstants::new();
        match dir {
            Direction::Forward => self.compose_linear(c.r0()),
            Direction::Inverse => self.compose_linear(c.r0_inverse()),
        }
    }

    /// `∫ v² dx dy` from Gaussian moments.
    pub fn l2_norm_sq(&self) -> f64 {
        let sq = poly_mul(&self.poly, &self.poly);
        let [[a, b], [_, d]] = self.precision;
        // v² carries exp(−xᵀ(2A)x/2): covariance (2A)⁻¹
        let det2 = 4.0 * (a * d - b * b);
        let (sxx, sxy, syy) = (2.0 * d / det2, -2.0 * b / det2, 2.0 * a / det2);
        let dx = sq.len();
        let dy = sq.iter().map(Vec::len).max().unwrap_or(0);
        let mut mom = vec![vec![0.0; dy.max(1)]; dx.max(1)];
        for i in 0..dx {
            for j in 0..dy {
                mom[i][j] = if i == 0 && j == 0 {
                    1.0
                } else if i == 0 {
                    if j >= 2 { (j - 1) as f64 * syy * mom[0][j - 2] } else { 0.0 }
                } else {
                    let mut v = 0.0;
                    if i >= 2 {
                        v += (i - 1) as f64 * sxx * mom[i - 2][j];
                    }
                    if j >= 1 {
                        v += j as f64 * sxy * mom[i - 1][j - 1];
                    }
                    v
                };
            }
        }
        let e: f64 = sq.iter().enumerate().flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &c)| (i, j, c))).map(|(i, j, c)| c * mom[i][j]).sum();
        2.0 * PI / det2.sqrt() * e
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().max(0.0).sqrt()
    }
}

fn poly_add(a: &[Vec<f64>], b: &[Vec<f64>], cb: f64) -> Vec<Vec<f64>> {
    let dx = a.len().max(b.len());
    let mut out = vec![Vec::new(); dx];
    for (i, row) in out.iter_mut().enumerate() {
        let ra = a.get(i).map(Vec::as_slice).unwrap_or(&[]);
        let rb = b.get(i).map(Vec::as_slice).unwrap_or(&[]);
        *row = (0..ra.len().max(rb.len()))
            .map(|j| ra.get(j).copied().unwrap_or(0.0) + cb * rb.get(j).copied().unwrap_or(0.0))
            .collect();
    }
    out
}

/// Evaluates the trigonometric interpolant of `f` at the points `R₀x_j` for
/// every node `x_j` of its grid (a non-uniform, separable sum).
pub fn pullback_r0(f: &Field) -> Result<Field> {
    let g = *f.grid();
    if g.dim() != 2 {
        return Err(PropagatorError::NotTwoDimensional);
    }
    let c = SymmetrizerConstants::new();
    let m = g.points();
    let spec = f.to_frequency();
    let dk = g.dk();
    let nodes = g.nodes();
    let width = 2 * m;
    // sums s = a+b and differences d = a−b of signed modes, offset by m
    let ex: Vec<Complex64> = nodes
        .iter()
        .flat_map(|&x| (0..width).map(move |s| Complex64::from_polar(1.0, c.mu * dk * (s as f64 - m as f64) * x)))
        .collect();
    let ey: Vec<Complex64> = nodes
        .iter()
        .flat_map(|&y| (0..width).map(move |d| Complex64::from_polar(1.0, c.lambda * dk * (d as f64 - m as f64) * y)))
        .collect();
    let mut t = vec![Complex64::default(); m * width];
    for ia in 0..m {
        let a = g.signed_mode(ia);
        for ib in 0..m {
            let w = spec.values()[ia * m + ib];
            if w == Complex64::default() {
                continue;
            }
            let b = g.signed_mode(ib);
            let s = (a + b + m as i64) as usize;
            let d = (a - b + m as i64) as usize;
            for j in 0..m {
                t[j * width + d] += ex[j * width + s] * w;
            }
        }
    }
    let scale = g.length().powi(-2);
    let mut out = vec![Complex64::default(); g.len()];
    for j in 0..m {
        let row = &t[j * width..(j + 1) * width];
        for l in 0..m {
            let eyl = &ey[l * width..(l + 1) * width];
            let v: Complex64 = row.iter().zip(eyl).map(|(a, b)| a * b).sum();
            out[j * m + l] = v * scale;
        }
    }
    Ok(Field::new(g, out, Rep::Space)?)
}

/// `‖U_ZK(t)(Rv₀) − R(U_sym(t)v₀)‖ / ‖v₀‖`, both sides sampled on `grid`.
pub fn conjugacy_test(v0: &AnalyticDatum, t: f64, grid: &GridSpec) -> Result<f64> {
    let lhs = Propagator::new(PhaseKind::Zk2d, grid)?.evolve(&v0.apply_r(Direction::Forward)?.sample(grid)?, t)?.to_space();
    let sym = Propagator::new(PhaseKind::Sym2d, grid)?.evolve(&v0.sample(grid)?, t)?;
    let rhs = pullback_r0(&sym)?;
    Ok(lhs.sub(&rhs)?.l2_norm() / v0.l2_norm())
}
