//! Initial data recipes.

use crate::{Result, SolverError};
use spectral_core::{Complex64, Field, GridSpec};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Datum {
    /// `A e^{−|x|²/(2σ²)}` with its mean removed.
    Gaussian { amp: f64, sigma: f64 },
    /// `A (x₁/σ) e^{1/2 − |x|²/(2σ²)}` (odd in x₁, peak value `A`), mean removed.
    Dipole { amp: f64, sigma: f64 },
    Zero,
}

impl Datum {
    pub fn amp(&self) -> f64 {
        match *self {
            Datum::Gaussian { amp, .. } | Datum::Dipole { amp, .. } => amp,
            Datum::Zero => 0.0,
        }
    }

    pub fn with_amp(&self, amp: f64) -> Datum {
        match *self {
            Datum::Gaussian { sigma, .. } => Datum::Gaussian { amp, sigma },
            Datum::Dipole { sigma, .. } => Datum::Dipole { amp, sigma },
            Datum::Zero => Datum::Zero,
        }
    }

    pub fn sample(&self, grid: &GridSpec) -> Field {
        match *self {
            Datum::Zero => Field::from_real_fn(*grid, |_| 0.0),
            Datum::Gaussian { amp, sigma } => {
                let f = Field::from_real_fn(*grid, |x| amp * (-x.iter().map(|v| v * v).sum::<f64>() / (2.0 * sigma * sigma)).exp());
                remove_mean(&f)
            }
            Datum::Dipole { amp, sigma } => remove_mean(&Field::from_real_fn(*grid, |x| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                amp * x[0] / sigma * (0.5 - r2 / (2.0 * sigma * sigma)).exp()
            })),
        }
    }
}

/// Subtracts the node average.
pub fn remove_mean(f: &Field) -> Field {
    let s = f.to_space();
    let mean: Complex64 = s.values().iter().sum::<Complex64>() / s.values().len() as f64;
    let vals = s.values().iter().map(|v| v - mean).collect();
    Field::new(*f.grid(), vals, spectral_core::Rep::Space).expect("same length")
}

impl fmt::Display for Datum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Datum::Gaussian { amp, sigma } => write!(f, "gaussian:{amp}:{sigma}"),
            Datum::Dipole { amp, sigma } => write!(f, "dipole:{amp}:{sigma}"),
            Datum::Zero => f.write_str("zero"),
        }
    }
}

/// `gaussian:A[:σ]`, `dipole:A[:σ]` or `zero`; σ defaults to 1.
impl FromStr for Datum {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || SolverError::Config(format!("datum `{s}` is not of the form gaussian:A[:sigma], dipole:A[:sigma] or zero"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts == ["zero"] {
            return Ok(Datum::Zero);
        }
        if parts.len() < 2 || parts.len() > 3 {
            return Err(bad());
        }
        let amp: f64 = parts[1].parse().map_err(|_| bad())?;
        let sigma: f64 = parts.get(2).map_or(Ok(1.0), |v| v.parse()).map_err(|_| bad())?;
        if !amp.is_finite() || !(sigma > 0.0) {
            return Err(bad());
        }
        match parts[0] {
            "gaussian" => Ok(Datum::Gaussian { amp, sigma }),
            "dipole" => Ok(Datum::Dipole { amp, sigma }),
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn parse_roundtrip() {
        for s in ["gaussian:0.01:1", "dipole:0.5:2", "zero"] {
            assert_eq!(s.parse::<Datum>().unwrap().to_string(), s);
        }
        assert_eq!("gaussian:0.1".parse::<Datum>().unwrap(), Datum::Gaussian { amp: 0.1, sigma: 1.0 });
        for s in ["gauss:1", "gaussian", "gaussian:x", "dipole:1:-1", "gaussian:1:2:3"] {
            assert!(s.parse::<Datum>().is_err(), "{s}");
        }
    }

    #[test]
    fn recipes_are_zero_mean() {
        let g = GridSpec::new(2, 8.0 * PI, 32).unwrap();
        for d in [Datum::Gaussian { amp: 1.0, sigma: 1.0 }, Datum::Dipole { amp: 1.0, sigma: 1.0 }] {
            let f = d.sample(&g);
            assert!(f.to_frequency().mean_mode().norm() < 1e-12);
        }
    }
}
