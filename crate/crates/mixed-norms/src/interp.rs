use crate::{MixedError, Result};
use spectral_core::trapezoid_weights;

fn lr(values: &[f64], weights: &[f64], r: f64) -> f64 {
    if r.is_infinite() {
        return values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    }
    values.iter().zip(weights).map(|(v, w)| w * v.abs().powf(r)).sum::<f64>().powf(1.0 / r)
}

/// Lyapunov bound `‖f‖_r ≤ ‖f‖_a^{1−θ} ‖f‖_b^θ`, `1/r = (1−θ)/a + θ/b`, under
/// an arbitrary positive discrete measure. Returns `(lhs, rhs, θ)`.
pub fn interpolate_bound_weighted(values: &[f64], weights: &[f64], r: f64, a: f64, b: f64) -> Result<(f64, f64, f64)> {
    for e in [r, a, b] {
        if !(e >= 1.0) {
            return Err(MixedError::BadExponent(e));
        }
    }
    let (lo, hi) = (a.min(b), a.max(b));
    if r < lo || r > hi {
        return Err(MixedError::OutsideRange { r, lo, hi });
    }
    let lhs = lr(values, weights, r);
    if a == b {
        return Ok((lhs, lr(values, weights, a), 0.0));
    }
    let theta = (1.0 / a - 1.0 / r) / (1.0 / a - 1.0 / b);
    let rhs = lr(values, weights, a).powf(1.0 - theta) * lr(values, weights, b).powf(theta);
    Ok((lhs, rhs, theta))
}

/// Same bound for a scalar path sampled at `K+1` equispaced nodes (trapezoid measure).
pub fn interpolate_bound(values: &[f64], dt: f64, r: f64, a: f64, b: f64) -> Result<(f64, f64, f64)> {
    if values.len() < 2 {
        return Err(MixedError::EmptyPath);
    }
    interpolate_bound_weighted(values, &trapezoid_weights(values.len() - 1, dt), r, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_level_step() {
        // values 1 and 2 on halves of unit measure
        let (lhs, rhs, th) = interpolate_bound_weighted(&[1.0, 2.0], &[0.5, 0.5], 4.0, 2.0, 8.0).unwrap();
        let want_l = (0.5 * (1.0 + 16.0) as f64).powf(0.25);
        let a2 = (0.5 * 5.0f64).sqrt();
        let a8 = (0.5 * 257.0f64).powf(0.125);
        assert!((th - 2.0 / 3.0).abs() < 1e-15);
        assert!((lhs - want_l).abs() < 1e-14);
        assert!((rhs - a2.powf(1.0 / 3.0) * a8.powf(2.0 / 3.0)).abs() < 1e-14);
        assert!(lhs < rhs);
    }

    #[test]
    fn degenerate_and_constant() {
        let (l, r, th) = interpolate_bound(&[1.0, 3.0, 2.0], 0.1, 3.0, 3.0, 3.0).unwrap();
        assert_eq!((l, th), (r, 0.0));
        for (r, a, b) in [(2.0, 1.0, 4.0), (4.0, 8.0, 2.0), (3.0, 3.0, f64::INFINITY)] {
            let (l, rr, _) = interpolate_bound(&[0.7; 5], 0.25, r, a, b).unwrap();
            assert!((l - rr).abs() <= 1e-15 * l.max(1.0));
        }
        assert!(matches!(interpolate_bound(&[1.0, 2.0], 0.1, 9.0, 2.0, 8.0), Err(MixedError::OutsideRange { .. })));
    }
}
