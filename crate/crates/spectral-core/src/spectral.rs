use crate::error::{Result, SpectralError};
use crate::fft::fft_nd;
use crate::field::{Field, Rep};
use crate::grid::GridSpec;
use num_complex::Complex64;

/// Applies `(-1)^{Σ m_a}` (the shift from nodes starting at `-L/2`) and a
/// constant scale. Requires an even point count.
fn parity_scale(values: &mut [Complex64], n: usize, m: usize, scale: f64) {
    for (flat, v) in values.iter_mut().enumerate() {
        let mut f = flat;
        let mut par = 0usize;
        for _ in 0..n {
            par += f % m;
            f /= m;
        }
        *v *= if par % 2 == 0 { scale } else { -scale };
    }
}

pub(crate) fn forward_raw(grid: &GridSpec, values: &mut [Complex64]) {
    fft_nd(values, grid.dim(), grid.points(), false);
    parity_scale(values, grid.dim(), grid.points(), grid.cell_volume());
}

pub(crate) fn inverse_raw(grid: &GridSpec, values: &mut [Complex64]) {
    parity_scale(values, grid.dim(), grid.points(), grid.length().powi(-(grid.dim() as i32)));
    fft_nd(values, grid.dim(), grid.points(), true);
}

/// Forward transform approximating `∫ e^{-i x·κ} u(x) dx` with weight `(L/M)^n`.
pub fn to_frequency(f: &Field) -> Field {
    match f.rep() {
        Rep::Frequency => f.clone(),
        Rep::Space => {
            let mut v = f.values().to_vec();
            forward_raw(f.grid(), &mut v);
            Field::raw(*f.grid(), v, Rep::Frequency)
        }
    }
}

/// Inverse transform `u(x) = L^{-n} Σ_κ f̂(κ) e^{i x·κ}`.
pub fn to_space(f: &Field) -> Field {
    match f.rep() {
        Rep::Space => f.clone(),
        Rep::Frequency => {
            let mut v = f.values().to_vec();
            inverse_raw(f.grid(), &mut v);
            Field::raw(*f.grid(), v, Rep::Space)
        }
    }
}

/// Multiplier sampled on the lattice, in FFT order.
pub fn multiplier_table(grid: &GridSpec, m: impl Fn(&[f64]) -> Complex64) -> Result<Vec<Complex64>> {
    let n = grid.dim();
    (0..grid.len())
        .map(|i| {
            let k = grid.kappa(i);
            let v = m(&k[..n]);
            if v.re.is_finite() && v.im.is_finite() {
                Ok(v)
            } else {
                Err(SpectralError::NonFiniteMultiplier(k[..n].to_vec()))
            }
        })
        .collect()
}

/// Pointwise multiplication of the spectrum by `m(κ)`; result is in frequency rep.
pub fn apply_multiplier(f: &Field, m: impl Fn(&[f64]) -> Complex64) -> Result<Field> {
    let table = multiplier_table(f.grid(), m)?;
    apply_table(f, &table)
}

pub fn apply_table(f: &Field, table: &[Complex64]) -> Result<Field> {
    if table.len() != f.grid().len() {
        return Err(SpectralError::LengthMismatch { expected: f.grid().len(), got: table.len() });
    }
    let mut g = to_frequency(f);
    for (v, m) in g.values_mut().iter_mut().zip(table) {
        *v *= m;
    }
    Ok(g)
}

/// Real multiplier variant, for the common case of magnitude-only symbols.
pub fn apply_real_table(f: &Field, table: &[f64]) -> Result<Field> {
    if table.len() != f.grid().len() {
        return Err(SpectralError::LengthMismatch { expected: f.grid().len(), got: table.len() });
    }
    let mut g = to_frequency(f);
    for (v, m) in g.values_mut().iter_mut().zip(table) {
        *v *= m;
    }
    Ok(g)
}

/// `ceil(pad·M)` rounded up to even.
pub fn padded_points(m: usize, pad: f64) -> usize {
    let mp = (pad * m as f64 - 1e-9).ceil() as usize;
    mp.max(m) + (mp.max(m) % 2)
}

/// Copies spectral coefficients between lattices of different sizes, matching
/// signed modes; modes absent from the destination are dropped.
pub fn transfer_spectrum(src: &[Complex64], n: usize, ms: usize, md: usize) -> Vec<Complex64> {
    let mut dst = vec![Complex64::default(); md.pow(n as u32)];
    let small = ms.min(md);
    let slot = |i: usize, from: usize, to: usize| -> Option<usize> {
        let s = if i < from / 2 { i as i64 } else { i as i64 - from as i64 };
        let half = (to / 2) as i64;
        if s < -half || s >= half {
            None
        } else {
            Some(if s >= 0 { s as usize } else { (s + to as i64) as usize })
        }
    };
    let total = small.pow(n as u32);
    'outer: for flat in 0..total {
        // enumerate the signed modes common to both lattices
        let mut f = flat;
        let mut si = 0usize;
        let mut di = 0usize;
        let mut ps = 1usize;
        let mut pd = 1usize;
        for _ in 0..n {
            let i = f % small;
            f /= small;
            let s_mode = if i < small / 2 { i as i64 } else { i as i64 - small as i64 };
            let is = if s_mode >= 0 { s_mode as usize } else { (s_mode + ms as i64) as usize };
            let id = match slot(is, ms, md) {
                Some(v) => v,
                None => continue 'outer,
            };
            si += is * ps;
            di += id * pd;
            ps *= ms;
            pd *= md;
        }
        dst[di] = src[si];
    }
    dst
}

fn padded_space(f: &Field, pg: &GridSpec) -> Vec<Complex64> {
    let spec = to_frequency(f);
    let g = f.grid();
    let mut v = transfer_spectrum(spec.values(), g.dim(), g.points(), pg.points());
    inverse_raw(pg, &mut v);
    v
}

fn back_from_padded(grid: &GridSpec, pg: &GridSpec, mut prod: Vec<Complex64>) -> Field {
    forward_raw(pg, &mut prod);
    let v = transfer_spectrum(&prod, grid.dim(), pg.points(), grid.points());
    Field::raw(*grid, v, Rep::Frequency)
}

/// Pointwise product of the trigonometric interpolants, evaluated on a grid
/// padded by `pad` and truncated back; result in frequency rep. With
/// `pad ≥ (j+1)/2` for a `j`-fold product the retained modes are exact.
pub fn dealias_product(fs: &[&Field], pad: f64) -> Result<Field> {
    if !(pad >= 1.0) {
        return Err(SpectralError::PadTooSmall(pad));
    }
    let first = fs.first().ok_or(SpectralError::EmptyProduct)?;
    for f in fs {
        first.check_compatible(f)?;
    }
    let g = first.grid();
    let pg = GridSpec::padded(g.dim(), g.length(), padded_points(g.points(), pad));
    let mut acc = padded_space(first, &pg);
    for f in &fs[1..] {
        let v = padded_space(f, &pg);
        for (a, b) in acc.iter_mut().zip(&v) {
            *a *= b;
        }
    }
    Ok(back_from_padded(g, &pg, acc))
}

/// `f^p` (complex power of the interpolant), dealiased like [`dealias_product`].
pub fn dealiased_power(f: &Field, p: u32, pad: f64) -> Result<Field> {
    if !(pad >= 1.0) {
        return Err(SpectralError::PadTooSmall(pad));
    }
    let g = f.grid();
    let pg = GridSpec::padded(g.dim(), g.length(), padded_points(g.points(), pad));
    let mut v = padded_space(f, &pg);
    for x in v.iter_mut() {
        *x = x.powu(p);
    }
    Ok(back_from_padded(g, &pg, v))
}

/// `(Σ_j h^n |u_j|^p)^{1/p}`; `p = ∞` is the node maximum.
pub fn lp_space_norm(f: &Field, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(SpectralError::BadExponent(p));
    }
    let u = to_space(f);
    if p.is_infinite() {
        return Ok(u.values().iter().fold(0.0f64, |a, v| a.max(v.norm())));
    }
    let s: f64 = u.values().iter().map(|v| v.norm().powf(p)).sum();
    Ok((s * f.grid().cell_volume()).powf(1.0 / p))
}

/// Composite trapezoid weights on `K+1` equispaced nodes.
pub fn trapezoid_weights(steps: usize, dt: f64) -> Vec<f64> {
    let mut w = vec![dt; steps + 1];
    w[0] = 0.5 * dt;
    w[steps] = 0.5 * dt;
    w
}
