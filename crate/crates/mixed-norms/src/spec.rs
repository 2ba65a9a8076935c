use crate::{MixedError, Result};
use spectral_core::{trapezoid_weights, Complex64, FieldPath, GridSpec};
use std::fmt;
use std::str::FromStr;

/// One parenthesised group, e.g. `(yt:2)`. `y` stands for every transverse axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisGroup {
    pub x: bool,
    pub y: bool,
    pub t: bool,
    pub p: f64,
}

/// Ordered axis groups, outermost first: `(x:∞)(yt:2)` is `L^∞_x L²_{yt}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedSpec {
    groups: Vec<AxisGroup>,
}

/// Parses `4`, `15/4`, `2.5`, `inf`, `∞`.
pub fn parse_exponent(s: &str) -> Option<f64> {
    let s = s.trim();
    match s {
        "inf" | "Inf" | "infinity" | "∞" => return Some(f64::INFINITY),
        _ => {}
    }
    if let Some((a, b)) = s.split_once('/') {
        let a: f64 = a.trim().parse().ok()?;
        let b: f64 = b.trim().parse().ok()?;
        return Some(a / b);
    }
    s.parse().ok()
}

impl MixedSpec {
    pub fn new(groups: Vec<AxisGroup>) -> Result<Self> {
        let count = |f: fn(&AxisGroup) -> bool| groups.iter().filter(|g| f(g)).count();
        if count(|g| g.x) != 1 || count(|g| g.y) != 1 || count(|g| g.t) != 1 {
            return Err(MixedError::AxisMismatch);
        }
        if groups.iter().any(|g| !(g.x || g.y || g.t)) {
            return Err(MixedError::AxisMismatch);
        }
        for g in &groups {
            if !(g.p >= 1.0) {
                return Err(MixedError::BadExponent(g.p));
            }
        }
        Ok(MixedSpec { groups })
    }

    pub fn groups(&self) -> &[AxisGroup] {
        &self.groups
    }

    /// `L^p_{xyt}`.
    pub fn full(p: f64) -> Result<Self> {
        Self::new(vec![AxisGroup { x: true, y: true, t: true, p }])
    }

    /// `L^p_{xy} L^r_t` (space outside).
    pub fn space_time(p: f64, r: f64) -> Result<Self> {
        Self::new(vec![AxisGroup { x: true, y: true, t: false, p }, AxisGroup { x: false, y: false, t: true, p: r }])
    }

    /// `L^r_t L^p_{xy}` (time outside).
    pub fn time_space(r: f64, p: f64) -> Result<Self> {
        Self::new(vec![AxisGroup { x: false, y: false, t: true, p: r }, AxisGroup { x: true, y: true, t: false, p }])
    }

    /// Streaming evaluator over the snapshots of a path on `grid`.
    pub fn accumulator(&self, grid: &GridSpec, steps: usize, dt: f64) -> MixedAccumulator {
        MixedAccumulator::new(self.clone(), *grid, steps, dt)
    }
}

fn fmt_exp(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

impl fmt::Display for MixedSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.groups {
            let mut axes = String::new();
            if g.x {
                axes.push('x');
            }
            if g.y {
                axes.push('y');
            }
            if g.t {
                axes.push('t');
            }
            write!(f, "({axes}:{})", fmt_exp(g.p))?;
        }
        Ok(())
    }
}

impl FromStr for MixedSpec {
    type Err = MixedError;
    fn from_str(s: &str) -> Result<Self> {
        let err = |m: &str| MixedError::Parse(s.into(), m.into());
        let mut groups = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(|| err("expected '('"))?;
            let close = body.find(')').ok_or_else(|| err("unclosed group"))?;
            let (inner, tail) = (&body[..close], &body[close + 1..]);
            let (axes, exp) = inner.split_once(':').ok_or_else(|| err("group needs 'axes:exponent'"))?;
            let mut g = AxisGroup { x: false, y: false, t: false, p: parse_exponent(exp).ok_or_else(|| err("bad exponent"))? };
            for c in axes.trim().chars() {
                let slot = match c {
                    'x' => &mut g.x,
                    'y' => &mut g.y,
                    't' => &mut g.t,
                    _ => return Err(err("axes must be drawn from x, y, t")),
                };
                if *slot {
                    return Err(err("axis repeated"));
                }
                *slot = true;
            }
            groups.push(g);
            rest = tail.trim_start();
        }
        if groups.is_empty() {
            return Err(err("no groups"));
        }
        Self::new(groups)
    }
}

/// Array over a subset of the spatial axes (in original order), all of size `m`.
#[derive(Debug, Clone)]
struct Partial {
    axes: Vec<usize>,
    data: Vec<f64>,
}

fn reduce(part: &Partial, drop: &[bool], m: usize, h: f64, p: f64, root: bool) -> Partial {
    let keep: Vec<usize> = part.axes.iter().copied().filter(|&a| !drop[a]).collect();
    let nred = part.axes.len() - keep.len();
    if nred == 0 {
        let data = if root { part.data.clone() } else { part.data.iter().map(|v| pow(*v, p)).collect() };
        return Partial { axes: keep, data };
    }
    let out_len = m.pow(keep.len() as u32);
    let mut out = vec![0.0f64; out_len];
    let dims = part.axes.len();
    let mut idx = vec![0usize; dims];
    for &v in &part.data {
        let mut o = 0usize;
        for (d, &a) in part.axes.iter().enumerate() {
            if !drop[a] {
                o = o * m + idx[d];
            }
        }
        if p.is_infinite() {
            out[o] = out[o].max(v);
        } else {
            out[o] += fpow(v, p);
        }
        // advance the row-major counter
        for d in (0..dims).rev() {
            idx[d] += 1;
            if idx[d] < m {
                break;
            }
            idx[d] = 0;
        }
    }
    if p.is_finite() {
        let w = h.powi(nred as i32);
        for o in out.iter_mut() {
            *o *= w;
            if root {
                *o = o.powf(1.0 / p);
            }
        }
    }
    Partial { axes: keep, data: out }
}

fn pow(v: f64, p: f64) -> f64 {
    if p.is_infinite() {
        v
    } else {
        fpow(v, p)
    }
}

/// `v^p`, with integer exponents taking the cheaper path.
#[inline]
fn fpow(v: f64, p: f64) -> f64 {
    if p == p.trunc() && p <= 64.0 {
        v.powi(p as i32)
    } else {
        v.powf(p)
    }
}

/// Feeds snapshots one at a time; memory is one reduced array.
#[derive(Debug, Clone)]
pub struct MixedAccumulator {
    spec: MixedSpec,
    grid: GridSpec,
    weights: Vec<f64>,
    tgroup: usize,
    acc: Option<Partial>,
    seen: usize,
}

impl MixedAccumulator {
    fn new(spec: MixedSpec, grid: GridSpec, steps: usize, dt: f64) -> Self {
        let tgroup = spec.groups.iter().position(|g| g.t).expect("validated spec");
        MixedAccumulator { spec, grid, weights: trapezoid_weights(steps, dt), tgroup, acc: None, seen: 0 }
    }

    fn drop_mask(&self, g: &AxisGroup) -> Vec<bool> {
        (0..self.grid.dim()).map(|a| if a == 0 { g.x } else { g.y }).collect()
    }

    /// Adds snapshot `j` given as space-domain values.
    pub fn push(&mut self, j: usize, values: &[Complex64]) {
        let n = self.grid.dim();
        let m = self.grid.points();
        let h = self.grid.spacing();
        let mut part = Partial { axes: (0..n).collect(), data: values.iter().map(|v| v.norm()).collect() };
        for gi in (self.tgroup + 1..self.spec.groups.len()).rev() {
            let g = self.spec.groups[gi];
            part = reduce(&part, &self.drop_mask(&g), m, h, g.p, true);
        }
        let g = self.spec.groups[self.tgroup];
        let s = reduce(&part, &self.drop_mask(&g), m, h, g.p, false);
        let w = self.weights[j];
        match &mut self.acc {
            None => {
                let data = if g.p.is_infinite() { s.data } else { s.data.iter().map(|v| v * w).collect() };
                self.acc = Some(Partial { axes: s.axes, data });
            }
            Some(acc) => {
                for (a, v) in acc.data.iter_mut().zip(&s.data) {
                    if g.p.is_infinite() {
                        *a = a.max(*v);
                    } else {
                        *a += w * v;
                    }
                }
            }
        }
        self.seen += 1;
    }

    pub fn finish(self) -> f64 {
        let m = self.grid.points();
        let h = self.grid.spacing();
        let g = self.spec.groups[self.tgroup];
        let mut part = match self.acc.clone() {
            Some(p) => p,
            None => return 0.0,
        };
        if g.p.is_finite() {
            for v in part.data.iter_mut() {
                *v = v.powf(1.0 / g.p);
            }
        }
        for gi in (0..self.tgroup).rev() {
            let g = self.spec.groups[gi];
            let mask = self.drop_mask(&g);
            part = reduce(&part, &mask, m, h, g.p, true);
        }
        debug_assert!(part.axes.is_empty() && part.data.len() == 1);
        part.data[0]
    }
}

/// Mixed norm of a path over its full window `[0, K·Δt]`.
pub fn mixed_norm(u: &FieldPath, spec: &MixedSpec) -> f64 {
    let mut acc = spec.accumulator(u.grid(), u.steps(), u.dt());
    for (j, s) in u.snapshots().iter().enumerate() {
        acc.push(j, s.to_space().values());
    }
    acc.finish()
}
