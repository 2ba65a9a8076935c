use crate::config::RunConfig;
use crate::{EXIT_BREACH, EXIT_CONFIG, EXIT_GATE, EXIT_INTERNAL, EXIT_NONCONVERGENCE};
use estimate_lab::{run_estimate, Case, LabError, SuiteParams};
use gzk_solver::{diagnostics_csv, manifest, picard_solve, Datum, SolverError};
use littlewood_paley::{besov_norm, o_space_profile, profile_csv, sobolev_homog_norm, BesovParams};
use log::info;
use mixed_norms::{aux_norm, mixed_norm, parse_exponent, AuxFlavor, AuxParams, AxisGroup, MixedSpec};
use propagators::PhaseKind;
use spectral_core::io::{load_field, load_path, save_field, save_path, sniff, FileKind};
use spectral_core::{Field, FieldPath};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use variation_spaces::{p_variation, phase_adapted_vp, SampledPath};

/// A command outcome other than success: exit code plus message.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }

    fn config(message: impl Into<String>) -> Self {
        Self::new(EXIT_CONFIG, message)
    }

    fn io(what: &Path, e: impl std::fmt::Display) -> Self {
        Self::new(EXIT_INTERNAL, format!("{}: {e}", what.display()))
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, Failure> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::config(format!("cannot read config {}: {e}", p.display())))?;
            RunConfig::parse(&text).map_err(|e| Failure::config(format!("{}: {e}", p.display())))
        }
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::io(path, e))
}

fn out_dir(rc: &RunConfig, out: Option<&Path>) -> Result<PathBuf, Failure> {
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(&rc.out_dir));
    fs::create_dir_all(&dir).map_err(|e| Failure::io(&dir, e))?;
    Ok(dir)
}

#[derive(Debug, Clone, Default)]
pub struct SimulateOpts {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub override_gate: bool,
    /// `gaussian:A[:σ]`, `dipole:A[:σ]`, `zero` or `file:<path>`.
    pub datum: Option<String>,
}

pub const DEFAULT_DATUM: &str = "gaussian:0.01:1";

fn load_datum(spec: &str, rc: &RunConfig) -> Result<Field, Failure> {
    let grid = rc.grid().map_err(Failure::config)?;
    if let Some(file) = spec.strip_prefix("file:") {
        let f = load_field(file).map_err(|e| Failure::config(format!("cannot read datum {file}: {e}")))?;
        if *f.grid() != grid {
            return Err(Failure::config(format!("datum {file} lives on a different grid than the configuration")));
        }
        return Ok(f);
    }
    let d: Datum = spec.parse().map_err(|e: SolverError| Failure::config(e.to_string()))?;
    Ok(d.sample(&grid))
}

/// Solves from the datum and writes `manifest.txt`, `u0.gzkp`,
/// `solution.gzkp` and `diagnostics.csv` into the output directory.
pub fn simulate(opts: &SimulateOpts) -> Result<String, Failure> {
    let mut rc = load_config(opts.config.as_deref())?;
    if let Some(s) = opts.seed {
        rc.seed = s;
        rc.explicit.insert("seed".into(), s.to_string());
    }
    let cfg = rc.solver(opts.override_gate).map_err(Failure::config)?;
    let datum_spec = opts.datum.clone().unwrap_or_else(|| DEFAULT_DATUM.to_string());
    let u0 = load_datum(&datum_spec, &rc)?;
    let dir = out_dir(&rc, opts.out.as_deref())?;
    let u0_path = dir.join("u0.gzkp");
    save_field(&u0, &u0_path).map_err(|e| Failure::io(&u0_path, e))?;
    let mut extra = rc.echo();
    extra.push(("run.seed".into(), rc.seed.to_string()));
    extra.push(("run.datum".into(), datum_spec.clone()));
    info!("simulate: datum {datum_spec}, grid {:?}", cfg.grid);
    let outcome = picard_solve(&u0, &cfg);
    let man = dir.join("manifest.txt");
    match outcome {
        Ok(r) => {
            extra.push(("run.status".into(), "converged".into()));
            let sol = dir.join("solution.gzkp");
            save_path(&r.solution, &sol).map_err(|e| Failure::io(&sol, e))?;
            write(&dir.join("diagnostics.csv"), &diagnostics_csv(&r.diagnostics))?;
            let text = manifest(&cfg, Some(&r), &extra);
            write(&man, &text)?;
            Ok(format!(
                "converged in {} iterations (fixed-point residual {:.6e}); mass drift {:.3e}, L2 drift {:.3e}\nwrote {}",
                r.iterations(),
                r.fixed_point_residual,
                r.diagnostics.mass_drift,
                r.diagnostics.l2_drift,
                dir.display()
            ))
        }
        Err(e) => {
            let (code, status) = match &e {
                SolverError::NonConvergence { .. } => (EXIT_NONCONVERGENCE, "nonconvergence"),
                SolverError::GateFailed { .. } | SolverError::GateUndefined(_) => (EXIT_GATE, "gate_failed"),
                SolverError::Config(_) | SolverError::PadTooSmall { .. } | SolverError::NonZeroMean(_) | SolverError::Mismatch => {
                    (EXIT_CONFIG, "config_error")
                }
                _ => (EXIT_INTERNAL, "error"),
            };
            extra.push(("run.status".into(), status.into()));
            extra.push(("run.error".into(), e.to_string()));
            if let SolverError::NonConvergence { residuals, .. } = &e {
                let r: Vec<String> = residuals.iter().map(|v| format!("{v:.6e}")).collect();
                extra.push(("picard.residuals".into(), r.join(" ")));
            }
            write(&man, &manifest(&cfg, None, &extra))?;
            Err(Failure::new(code, e.to_string()))
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOpts {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub k: Option<u32>,
    pub case: Option<String>,
    pub trials: Option<usize>,
}

fn suite_params(rc: &RunConfig, opts: &VerifyOpts) -> Result<SuiteParams, Failure> {
    let has = |k: &str| rc.explicit.contains_key(k);
    let case = match &opts.case {
        Some(c) => Some(c.parse::<Case>().map_err(|e: LabError| Failure::config(e.to_string()))?),
        None => None,
    };
    Ok(SuiteParams {
        seed: opts.seed.unwrap_or(rc.seed),
        trials: opts.trials,
        dimension: opts.n.or(has("dimension").then_some(rc.dimension)),
        l: has("L").then_some(rc.l),
        m: has("M").then_some(rc.m),
        t: has("T").then_some(rc.t),
        steps: has("steps").then_some(rc.steps),
        k: opts.k.unwrap_or(rc.k) as i64,
        q: rc.q,
        eps: rc.epsilon_param,
        case,
        ..SuiteParams::default()
    })
}

/// Runs one estimate suite; writes `<id>.csv`, `<id>_summary.txt` and any
/// extra CSV documents. A failed check is exit 5.
pub fn verify(id: &str, opts: &VerifyOpts) -> Result<String, Failure> {
    let rc = load_config(opts.config.as_deref())?;
    let prm = suite_params(&rc, opts)?;
    let out = match run_estimate(id, &prm) {
        Ok(o) => o,
        Err(e @ LabError::UnknownEstimate(_)) => {
            return Err(Failure::config(format!("{e}; known ids: {}", estimate_lab::ESTIMATE_IDS.join(", "))))
        }
        Err(e) => return Err(Failure::config(e.to_string())),
    };
    let dir = out_dir(&rc, opts.out.as_deref())?;
    write(&dir.join(format!("{id}.csv")), &out.csv())?;
    let summary = out.summary();
    write(&dir.join(format!("{id}_summary.txt")), &summary)?;
    for (name, text) in &out.extra_csv {
        write(&dir.join(name), text)?;
    }
    if out.passed() {
        Ok(summary)
    } else {
        Err(Failure::new(EXIT_BREACH, format!("{summary}\nestimate {id}: a ratio ceiling or check was breached")))
    }
}

#[derive(Debug, Clone, Default)]
pub struct NormOpts {
    /// `besov`, `sobolev`, `mixed`, `aux` or `pvar`.
    pub norm: String,
    pub s: Option<f64>,
    pub q: Option<String>,
    pub k: Option<u32>,
    pub t: Option<f64>,
    pub p: Option<f64>,
    /// Mixed spec such as `(x:inf)(yt:2)`.
    pub spec: Option<String>,
    pub phase: Option<String>,
}

enum Stored {
    Field(Field),
    Path(FieldPath),
}

fn load_any(file: &Path) -> Result<Stored, Failure> {
    let unreadable = |e: spectral_core::io::FormatError| Failure::config(format!("cannot read {}: {e}", file.display()));
    match sniff(file).map_err(unreadable)? {
        FileKind::Field => Ok(Stored::Field(load_field(file).map_err(unreadable)?)),
        FileKind::Path => Ok(Stored::Path(load_path(file).map_err(unreadable)?)),
    }
}

/// `(x:inf)(yt:2)`: groups outermost first.
pub fn parse_mixed_spec(s: &str) -> Result<MixedSpec, String> {
    let bad = || format!("mixed spec `{s}` is not of the form (x:p)(yt:r)…");
    let mut groups = Vec::new();
    let body = s.trim();
    if !body.starts_with('(') || !body.ends_with(')') {
        return Err(bad());
    }
    for part in body[1..body.len() - 1].split(")(") {
        let (axes, p) = part.split_once(':').ok_or_else(bad)?;
        let p = parse_exponent(p).ok_or_else(bad)?;
        if axes.is_empty() || axes.chars().any(|c| !"xyt".contains(c)) {
            return Err(bad());
        }
        groups.push(AxisGroup { x: axes.contains('x'), y: axes.contains('y'), t: axes.contains('t'), p });
    }
    MixedSpec::new(groups).map_err(|e| e.to_string())
}

fn fmt15(v: f64) -> String {
    format!("{v:.14e}")
}

fn need_path(s: Stored, what: &str) -> Result<FieldPath, Failure> {
    match s {
        Stored::Path(p) => Ok(p),
        Stored::Field(_) => Err(Failure::config(format!("{what} needs a stored path, got a single field"))),
    }
}

fn phase_for(opts: &NormOpts, n: usize) -> Result<PhaseKind, Failure> {
    match &opts.phase {
        Some(p) => p.parse().map_err(|e: propagators::PropagatorError| Failure::config(e.to_string())),
        None => Ok(PhaseKind::zk(n)),
    }
}

/// Prints `name = value` lines for a stored field or path.
pub fn norms(file: &Path, opts: &NormOpts) -> Result<String, Failure> {
    let stored = load_any(file)?;
    let q = match &opts.q {
        Some(q) => parse_exponent(q).ok_or_else(|| Failure::config(format!("`{q}` is not an exponent")))?,
        None => 2.0,
    };
    let mut out = String::new();
    let fields = |s: &Stored| -> Vec<(String, Field)> {
        match s {
            Stored::Field(f) => vec![(String::new(), f.clone())],
            Stored::Path(p) => p.snapshots().iter().enumerate().map(|(j, f)| (format!("[{j}]"), f.clone())).collect(),
        }
    };
    match opts.norm.as_str() {
        "besov" => {
            let s = opts.s.unwrap_or(0.0);
            let prm = BesovParams::new(s, q).map_err(|e| Failure::config(e.to_string()))?;
            for (tag, f) in fields(&stored) {
                let v = besov_norm(&f, prm).map_err(|e| Failure::config(e.to_string()))?;
                writeln!(out, "besov{tag} = {}", fmt15(v)).unwrap();
            }
        }
        "sobolev" => {
            for (tag, f) in fields(&stored) {
                writeln!(out, "sobolev{tag} = {}", fmt15(sobolev_homog_norm(&f, opts.s.unwrap_or(0.0)))).unwrap();
            }
        }
        "mixed" => {
            let path = need_path(stored, "the mixed norm")?;
            let spec = parse_mixed_spec(opts.spec.as_deref().unwrap_or("(xyt:2)")).map_err(Failure::config)?;
            writeln!(out, "mixed = {}", fmt15(mixed_norm(&path, &spec))).unwrap();
        }
        "aux" => {
            let path = need_path(stored, "the aux norm")?;
            let n = path.grid().dim();
            let kind = phase_for(opts, n)?;
            let prm = AuxParams::new(n, opts.k.unwrap_or(3) as i64, q, opts.t.unwrap_or(path.t_end()))
                .map_err(|e| Failure::config(e.to_string()))?;
            let v = aux_norm(&path, &prm, AuxFlavor::for_phase(kind)).map_err(|e| Failure::config(e.to_string()))?;
            writeln!(out, "aux = {}", fmt15(v)).unwrap();
        }
        "pvar" => {
            let path = need_path(stored, "the p-variation")?;
            let p = opts.p.unwrap_or(2.0);
            let v = p_variation(&SampledPath::from_field_path(&path), p).map_err(|e| Failure::config(e.to_string()))?;
            writeln!(out, "p_variation = {}", fmt15(v)).unwrap();
            let kind = phase_for(opts, path.grid().dim())?;
            let w = phase_adapted_vp(&path, p, kind).map_err(|e| Failure::config(e.to_string()))?;
            writeln!(out, "phase_adapted_vp = {}", fmt15(w)).unwrap();
        }
        other => return Err(Failure::config(format!("unknown norm `{other}` (besov, sobolev, mixed, aux, pvar)"))),
    }
    Ok(out)
}

/// CSV of `(N, N^s ‖P_N f‖)`; a stored path contributes its last snapshot.
pub fn lp_profile(file: &Path, s: f64) -> Result<String, Failure> {
    let f = match load_any(file)? {
        Stored::Field(f) => f,
        Stored::Path(p) => p.snapshots().last().cloned().expect("paths are nonempty"),
    };
    Ok(profile_csv(&o_space_profile(&f, s)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_spec_syntax() {
        let s = parse_mixed_spec("(x:inf)(yt:2)").unwrap();
        assert_eq!(s.groups().len(), 2);
        assert_eq!(s.groups()[0].p, f64::INFINITY);
        assert!(parse_mixed_spec("(xyt:15/4)").is_ok());
        for bad in ["x:2", "(x:2)", "(q:2)(yt:2)", "(x:2)(y:2)", "(xyt:0.5)"] {
            assert!(parse_mixed_spec(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn unknown_estimate_is_config_error() {
        let e = verify("nope", &VerifyOpts::default()).unwrap_err();
        assert_eq!(e.code, EXIT_CONFIG);
        assert!(e.message.contains("kato2d"));
    }
}
