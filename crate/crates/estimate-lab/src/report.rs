use crate::{LabError, Result};
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trial {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl Trial {
    pub fn new(lhs: f64, rhs: f64) -> Result<Self> {
        if !(rhs > 0.0) || !rhs.is_finite() {
            return Err(LabError::ZeroRhs);
        }
        let ratio = lhs / rhs;
        if !ratio.is_finite() {
            return Err(LabError::BadParameter(format!("non-finite ratio {lhs}/{rhs}")));
        }
        Ok(Trial { lhs, rhs, ratio })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolution {
    pub l: f64,
    pub m: usize,
    pub dt: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub max: f64,
    pub mean: f64,
    pub stddev: f64,
}

#[derive(Debug, Clone)]
pub struct EstimateReport {
    pub id: String,
    pub trials: Vec<Trial>,
    pub resolution: Resolution,
    /// Largest acceptable ratio.
    pub ceiling: f64,
    /// Measured relative change under refinement, when a study was run.
    pub stability: Option<f64>,
    pub tolerance: f64,
    /// Extra `key = value` lines for the summary.
    pub notes: Vec<(String, String)>,
    /// Named side conditions `value ≤ limit` that must all hold.
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
}

impl Check {
    pub fn holds(&self) -> bool {
        self.value <= self.limit
    }
}

/// 15 significant digits, the format used by every report.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.14e}")
}

impl EstimateReport {
    pub fn new(id: &str, resolution: Resolution) -> Self {
        EstimateReport {
            id: id.to_string(),
            trials: Vec::new(),
            resolution,
            ceiling: 1e6,
            stability: None,
            tolerance: 0.1,
            notes: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, t: Trial) {
        self.trials.push(t);
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }

    /// Records `value ≤ limit` as a pass condition.
    pub fn check(&mut self, name: &str, value: f64, limit: f64) {
        self.checks.push(Check { name: name.to_string(), value, limit });
    }

    pub fn summary(&self) -> Summary {
        let r: Vec<f64> = self.trials.iter().map(|t| t.ratio).collect();
        if r.is_empty() {
            return Summary { max: 0.0, mean: 0.0, stddev: 0.0 };
        }
        let n = r.len() as f64;
        let mean = r.iter().sum::<f64>() / n;
        let var = r.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Summary { max: r.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)), mean, stddev: var.sqrt() }
    }

    pub fn ratios_finite(&self) -> bool {
        self.trials.iter().all(|t| t.ratio.is_finite())
    }

    pub fn passed(&self) -> bool {
        let s = self.summary();
        self.ratios_finite() && s.max <= self.ceiling && self.stability.is_none_or(|d| d <= self.tolerance)
            && self.checks.iter().all(Check::holds)
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("estimate_id, trial, L, M, dt, T, lhs, rhs, ratio\n");
        let r = &self.resolution;
        for (i, t) in self.trials.iter().enumerate() {
            let _ = writeln!(
                s,
                "{}, {}, {}, {}, {}, {}, {}, {}, {}",
                self.id,
                i,
                fmt_num(r.l),
                r.m,
                fmt_num(r.dt),
                fmt_num(r.t),
                fmt_num(t.lhs),
                fmt_num(t.rhs),
                fmt_num(t.ratio)
            );
        }
        s
    }

    pub fn summary_text(&self) -> String {
        let s = self.summary();
        let r = &self.resolution;
        let mut out = String::new();
        let _ = writeln!(out, "estimate_id = {}", self.id);
        let _ = writeln!(out, "trials = {}", self.trials.len());
        let _ = writeln!(out, "L = {}", fmt_num(r.l));
        let _ = writeln!(out, "M = {}", r.m);
        let _ = writeln!(out, "dt = {}", fmt_num(r.dt));
        let _ = writeln!(out, "T = {}", fmt_num(r.t));
        let _ = writeln!(out, "ratio_max = {}", fmt_num(s.max));
        let _ = writeln!(out, "ratio_mean = {}", fmt_num(s.mean));
        let _ = writeln!(out, "ratio_stddev = {}", fmt_num(s.stddev));
        let _ = writeln!(out, "ratio_ceiling = {}", fmt_num(self.ceiling));
        match self.stability {
            Some(d) => {
                let _ = writeln!(out, "stability = {}", fmt_num(d));
            }
            None => {
                let _ = writeln!(out, "stability = n/a");
            }
        }
        let _ = writeln!(out, "stability_tolerance = {}", fmt_num(self.tolerance));
        for c in &self.checks {
            let _ = writeln!(out, "check_{} = {} (limit {}, {})", c.name, fmt_num(c.value), fmt_num(c.limit), if c.holds() { "ok" } else { "violated" });
        }
        for (k, v) in &self.notes {
            let _ = writeln!(out, "{k} = {v}");
        }
        let _ = writeln!(out, "pass = {}", self.passed());
        out
    }
}

/// Relative change of the ensemble maxima of two reports.
pub fn relative_change(a: &EstimateReport, b: &EstimateReport) -> f64 {
    let (x, y) = (a.summary().max, b.summary().max);
    if x == 0.0 && y == 0.0 {
        return 0.0;
    }
    (y - x).abs() / x.abs().max(y.abs())
}
