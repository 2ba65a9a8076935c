//! Unnormalized n-dimensional FFTs over isotropic row-major arrays.

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

thread_local! {
    static PLANS: RefCell<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

pub(crate) fn plan(m: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|p| {
        let mut p = p.borrow_mut();
        if let Some(f) = p.1.get(&(m, inverse)) {
            return f.clone();
        }
        let dir = if inverse { FftDirection::Inverse } else { FftDirection::Forward };
        let f = p.0.plan_fft(m, dir);
        p.1.insert((m, inverse), f.clone());
        f
    })
}

/// In-place transform of an `m^n` array along every axis. `inverse` flips the
/// exponent sign; no normalization is applied.
pub fn fft_nd(data: &mut [Complex64], n: usize, m: usize, inverse: bool) {
    debug_assert_eq!(data.len(), m.pow(n as u32));
    let f = plan(m, inverse);
    let mut scratch = vec![Complex64::default(); f.get_inplace_scratch_len()];
    // last axis: contiguous lines
    f.process_with_scratch(data, &mut scratch);
    let mut block = Vec::new();
    for axis in (0..n - 1).rev() {
        let stride = m.pow((n - 1 - axis) as u32);
        let span = m * stride;
        block.resize(span, Complex64::default());
        for chunk in data.chunks_mut(span) {
            // chunk is an m x stride matrix; transpose so the axis is contiguous
            for r in 0..m {
                for c in 0..stride {
                    block[c * m + r] = chunk[r * stride + c];
                }
            }
            f.process_with_scratch(&mut block, &mut scratch);
            for r in 0..m {
                for c in 0..stride {
                    chunk[r * stride + c] = block[c * m + r];
                }
            }
        }
    }
}

/// 1D transform of many contiguous lines of length `m`.
pub fn fft_lines(data: &mut [Complex64], m: usize, inverse: bool) {
    let f = plan(m, inverse);
    let mut scratch = vec![Complex64::default(); f.get_inplace_scratch_len()];
    f.process_with_scratch(data, &mut scratch);
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive(data: &[Complex64], n: usize, m: usize) -> Vec<Complex64> {
        let len = data.len();
        let idx = |mut f: usize| {
            let mut v = vec![0usize; n];
            for a in (0..n).rev() {
                v[a] = f % m;
                f /= m;
            }
            v
        };
        (0..len)
            .map(|k| {
                let kk = idx(k);
                let mut acc = Complex64::default();
                for (j, &u) in data.iter().enumerate() {
                    let jj = idx(j);
                    let ph: usize = kk.iter().zip(&jj).map(|(a, b)| a * b).sum();
                    acc += u * Complex64::from_polar(1.0, -2.0 * PI * (ph % m) as f64 / m as f64);
                }
                acc
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        for (n, m) in [(2usize, 8usize), (3, 4), (2, 6)] {
            let len = m.pow(n as u32);
            let data: Vec<Complex64> = (0..len)
                .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
                .collect();
            let mut fast = data.clone();
            fft_nd(&mut fast, n, m, false);
            let slow = naive(&data, n, m);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }
}
