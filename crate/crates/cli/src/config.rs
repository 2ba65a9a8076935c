//! Flat `key = value` run configuration with `#` comments.

use gzk_solver::{EquationForm, SolverConfig, CALIBRATED_C};
use mixed_norms::parse_exponent;
use spectral_core::GridSpec;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write;

/// Every accepted key, in manifest order.
pub const KEYS: [&str; 14] =
    ["dimension", "k", "q", "L", "M", "T", "steps", "seed", "equation_form", "c0", "epsilon_param", "contraction_C", "pad_factor", "out_dir"];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dimension: usize,
    pub k: u32,
    pub q: f64,
    pub l: f64,
    pub m: usize,
    pub t: f64,
    pub steps: usize,
    pub seed: u64,
    pub equation_form: EquationForm,
    pub c0: f64,
    pub epsilon_param: f64,
    pub contraction_c: f64,
    pub pad_factor: f64,
    pub out_dir: String,
    /// Keys given explicitly, with their text as written.
    pub explicit: BTreeMap<String, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dimension: 2,
            k: 3,
            q: 2.0,
            l: 16.0 * PI,
            m: 128,
            t: 1.0,
            steps: 64,
            seed: 1,
            equation_form: EquationForm::Original,
            c0: 1.0,
            epsilon_param: 0.01,
            contraction_c: CALIBRATED_C,
            pad_factor: 2.5,
            out_dir: "gzk-out".into(),
            explicit: BTreeMap::new(),
        }
    }
}

fn num(key: &str, v: &str) -> Result<f64, String> {
    let x: f64 = v.parse().map_err(|_| format!("`{key}`: `{v}` is not a decimal number"))?;
    if !x.is_finite() {
        return Err(format!("`{key}` must be finite, got `{v}`"));
    }
    Ok(x)
}

fn int(key: &str, v: &str) -> Result<u64, String> {
    v.parse().map_err(|_| format!("`{key}`: `{v}` is not a non-negative integer"))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut c = RunConfig::default();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| format!("line {}: expected `key = value`", ln + 1))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(format!("line {}: unknown key `{key}` (accepted keys: {})", ln + 1, KEYS.join(", ")));
            }
            if c.explicit.contains_key(key) {
                return Err(format!("line {}: key `{key}` given twice", ln + 1));
            }
            c.set(key, value)?;
            c.explicit.insert(key.to_string(), value.to_string());
        }
        if !c.explicit.contains_key("pad_factor") {
            c.pad_factor = SolverConfig::min_pad(c.k);
        }
        c.validate()?;
        Ok(c)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        match key {
            "dimension" => self.dimension = int(key, v)? as usize,
            "k" => self.k = u32::try_from(int(key, v)?).map_err(|_| format!("`k` = {v} is too large"))?,
            "q" => self.q = parse_exponent(v).ok_or_else(|| format!("`q`: `{v}` is not an exponent"))?,
            "L" => self.l = num(key, v)?,
            "M" => self.m = int(key, v)? as usize,
            "T" => self.t = num(key, v)?,
            "steps" => self.steps = int(key, v)? as usize,
            "seed" => self.seed = int(key, v)?,
            "equation_form" => self.equation_form = v.parse().map_err(|e: gzk_solver::SolverError| e.to_string())?,
            "c0" => self.c0 = num(key, v)?,
            "epsilon_param" => self.epsilon_param = num(key, v)?,
            "contraction_C" => self.contraction_c = num(key, v)?,
            "pad_factor" => self.pad_factor = num(key, v)?,
            "out_dir" => self.out_dir = v.to_string(),
            _ => unreachable!("checked against KEYS"),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.dimension == 2 || self.dimension == 3) {
            return Err(format!("`dimension` must be 2 or 3, got {}", self.dimension));
        }
        if !self.m.is_power_of_two() || self.m < 8 {
            return Err(format!("`M` = {} violates the grid rule: M must be a power of two, at least 8", self.m));
        }
        if self.k < 1 {
            return Err("`k` must be >= 1".into());
        }
        if !(self.q >= 1.0) {
            return Err(format!("`q` must be >= 1, got {}", self.q));
        }
        if !(self.l > 0.0) || !(self.t > 0.0) {
            return Err("`L` and `T` must be positive".into());
        }
        if self.steps == 0 {
            return Err("`steps` must be >= 1".into());
        }
        if !(self.epsilon_param >= 0.0) {
            return Err("`epsilon_param` must be >= 0".into());
        }
        if !(self.contraction_c > 0.0) {
            return Err("`contraction_C` must be positive".into());
        }
        if self.equation_form == EquationForm::Symmetrized && self.dimension != 2 {
            return Err("`equation_form = symmetrized` needs dimension = 2".into());
        }
        if self.out_dir.is_empty() {
            return Err("`out_dir` must not be empty".into());
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<GridSpec, String> {
        GridSpec::new(self.dimension, self.l, self.m).map_err(|e| e.to_string())
    }

    pub fn solver(&self, override_gate: bool) -> Result<SolverConfig, String> {
        let cfg = SolverConfig {
            k: self.k,
            c0: self.c0,
            form: self.equation_form,
            t: self.t,
            steps: self.steps,
            pad: self.pad_factor,
            c: self.contraction_c,
            q: self.q,
            override_gate,
            ..SolverConfig::new(self.grid()?)
        };
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    /// Text of `key`: as written when explicit, else the default.
    pub fn value_text(&self, key: &str) -> String {
        if let Some(v) = self.explicit.get(key) {
            return v.clone();
        }
        match key {
            "dimension" => self.dimension.to_string(),
            "k" => self.k.to_string(),
            "q" => self.q.to_string(),
            "L" => self.l.to_string(),
            "M" => self.m.to_string(),
            "T" => self.t.to_string(),
            "steps" => self.steps.to_string(),
            "seed" => self.seed.to_string(),
            "equation_form" => self.equation_form.to_string(),
            "c0" => self.c0.to_string(),
            "epsilon_param" => self.epsilon_param.to_string(),
            "contraction_C" => self.contraction_c.to_string(),
            "pad_factor" => self.pad_factor.to_string(),
            "out_dir" => self.out_dir.clone(),
            _ => String::new(),
        }
    }

    /// `config.<key> = <value>` for every key, tagged `(default)` when implicit.
    pub fn echo(&self) -> Vec<(String, String)> {
        KEYS.iter()
            .map(|k| {
                let tag = if self.explicit.contains_key(*k) { "" } else { "  # default" };
                (format!("config.{k}"), format!("{}{tag}", self.value_text(k)))
            })
            .collect()
    }

    pub fn echo_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.echo() {
            writeln!(s, "{k} = {v}").unwrap();
        }
        s
    }
}
