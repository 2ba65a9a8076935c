use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gzk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gzk")).args(args).env_remove("GZK_THREADS").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = "# small quick run\nM = 32\nL = 25.132741228718345   # 8π\nT = 0.5\nsteps = 8\n";

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn simulate_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let o = gzk(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in ["manifest.txt", "u0.gzkp", "solution.gzkp", "diagnostics.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let man = fs::read_to_string(out.join("manifest.txt")).unwrap();
    for k in gzk_cli::config::KEYS {
        assert!(man.contains(&format!("config.{k} = ")), "{k}");
    }
    assert!(man.contains("config.M = 32\n") && man.contains("config.k = 3  # default"));
    assert!(man.contains("run.status = converged"));
    let csv = fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    assert!(csv.starts_with("t,mass,l2,besov_sc,aux_norm\n"));
    assert_eq!(csv.lines().count(), 10);
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = gzk(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "9", "--datum", "dipole:0.2:1.5"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        ["diagnostics.csv", "solution.gzkp", "manifest.txt"].map(|f| fs::read(out.join(f)).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "M = 12\n");
    let o = gzk(&["simulate", "--config", &cfg]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("power of two"), "{}", stderr(&o));
    let cfg = write_config(dir.path(), "resolution = 3\n");
    let o = gzk(&["simulate", "--config", &cfg]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("unknown key `resolution`"));
    let o = gzk(&["simulate", "--config", dir.path().join("missing.cfg").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let cfg = write_config(dir.path(), SMALL);
    let o = gzk(&["simulate", "--config", &cfg, "--datum", "blob:1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn gate_and_convergence_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{SMALL}out_dir = {}\n", dir.path().join("o").display()));
    let o = gzk(&["simulate", "--config", &cfg, "--datum", "gaussian:50"]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    assert!(stderr(&o).contains("lifespan gate"));
    let man = fs::read_to_string(dir.path().join("o/manifest.txt")).unwrap();
    assert!(man.contains("run.status = gate_failed"));
    let o = gzk(&["simulate", "--config", &cfg, "--datum", "gaussian:50", "--override-gate"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn verify_holder_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = gzk(&["verify", "holder-table", "--n", "2", "--k", "3", "--case", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("case = One"), "{s}");
    for b in ["sum_p_is_one = true", "sum_q_is_half = true", "sum_r_is_half = true"] {
        assert!(s.contains(b), "{b}");
    }
    assert!(dir.path().join("holder-table_summary.txt").exists());
}

#[test]
fn verify_rejects_unknown_id() {
    let o = gzk(&["verify", "kato4d", "--out", tempfile::tempdir().unwrap().path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("known ids"));
}

#[test]
fn verify_kato2d_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let o = gzk(&["verify", "kato2d", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("c_measured_mean = "));
    let csv = fs::read_to_string(dir.path().join("kato2d.csv")).unwrap();
    assert!(csv.starts_with("estimate_id, trial, L, M, dt, T, lhs, rhs, ratio\n"));
    assert_eq!(csv.lines().count(), 51);
}

#[test]
fn norms_and_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let g = spectral_core::GridSpec::new(2, 8.0 * PI, 32).unwrap();
    // modes (3, 0) and (0, −3): |κ| = 3/4, inside the band N = 1
    let f = spectral_core::Field::plane_wave(g, &[3, 0], spectral_core::Complex64::new(1.0, 0.0))
        .add(&spectral_core::Field::plane_wave(g, &[0, -3], spectral_core::Complex64::new(0.0, 0.5)))
        .unwrap();
    let fp = dir.path().join("band.gzkp");
    spectral_core::io::save_field(&f, &fp).unwrap();
    let lib = littlewood_paley::besov_norm(&f, littlewood_paley::BesovParams::new(0.5, 2.0).unwrap()).unwrap();
    let o = gzk(&["norms", fp.to_str().unwrap(), "--norm", "besov", "--s", "0.5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o), format!("besov = {lib:.14e}\n"));
    let o = gzk(&["lp-profile", fp.to_str().unwrap(), "--s", "-0.5"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("N, weighted_band_norm\n"));

    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("sim");
    assert_eq!(code(&gzk(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()])), 0);
    let sol = out.join("solution.gzkp");
    let o = gzk(&["norms", sol.to_str().unwrap(), "--norm", "aux", "--k", "3", "--q", "inf", "--T", "0.5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("aux = "));
    let o = gzk(&["norms", sol.to_str().unwrap(), "--norm", "pvar", "--p", "2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("p_variation = ") && stdout(&o).contains("phase_adapted_vp = "));
    let o = gzk(&["norms", sol.to_str().unwrap(), "--norm", "mixed", "--spec", "(x:inf)(yt:2)"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = gzk(&["norms", dir.path().join("nothing.gzkp").to_str().unwrap(), "--norm", "besov"]);
    assert_eq!(code(&o), 2);
    let o = gzk(&["norms", cfg.as_str(), "--norm", "besov"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn thread_cap_variable() {
    let o = Command::new(env!("CARGO_BIN_EXE_gzk"))
        .args(["verify", "holder-table", "--n", "3", "--case", "2", "--out", tempfile::tempdir().unwrap().path().to_str().unwrap()])
        .env("GZK_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = Command::new(env!("CARGO_BIN_EXE_gzk")).args(["verify", "holder-table"]).env("GZK_THREADS", "many").output().unwrap();
    assert_eq!(code(&o), 2);
}
