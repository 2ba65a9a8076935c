use clap::{Parser, Subcommand};
use gzk_cli::{lp_profile, norms, simulate, verify, NormOpts, SimulateOpts, VerifyOpts, EXIT_CONFIG};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gzk", version, about = "Pseudospectral lab for the generalized Zakharov-Kuznetsov equation")]
struct Cli {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Picard solve from a datum; writes manifest, snapshots and diagnostics.
    Simulate {
        /// Run even if the lifespan gate fails.
        #[arg(long)]
        override_gate: bool,
        /// gaussian:A[:sigma], dipole:A[:sigma], zero or file:<path.gzkp>.
        #[arg(long)]
        datum: Option<String>,
    },
    /// Run an estimate suite (kato2d, kato2d-full, kato3d, strichartz, maximal,
    /// retarded-maximal, kernel, multilinear, dyadic-sum, holder-table).
    Verify {
        id: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<u32>,
        /// Hölder table case: 1, 2 or 3.
        #[arg(long)]
        case: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Norms of a stored field or path: besov, sobolev, mixed, aux, pvar.
    Norms {
        file: PathBuf,
        #[arg(long)]
        norm: String,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<f64>,
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long = "T")]
        t: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        /// Mixed norm spec, e.g. "(x:inf)(yt:2)".
        #[arg(long)]
        spec: Option<String>,
        /// zk2d, sym2d, zk3d or sym3d.
        #[arg(long)]
        phase: Option<String>,
    },
    /// Weighted Littlewood-Paley band profile of a stored field.
    LpProfile {
        file: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        s: f64,
    },
}

fn init_threads() -> Result<(), String> {
    if let Ok(v) = std::env::var("GZK_THREADS") {
        let n: usize = v.parse().map_err(|_| format!("GZK_THREADS = `{v}` is not a thread count"))?;
        if n == 0 {
            return Err("GZK_THREADS must be at least 1".into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    let res = match cli.cmd {
        Cmd::Simulate { override_gate, datum } => {
            simulate(&SimulateOpts { config: cli.config, out: cli.out, seed: cli.seed, override_gate, datum })
        }
        Cmd::Verify { id, n, k, case, trials } => {
            verify(&id, &VerifyOpts { config: cli.config, out: cli.out, seed: cli.seed, n, k, case, trials })
        }
        Cmd::Norms { file, norm, s, q, k, t, p, spec, phase } => norms(&file, &NormOpts { norm, s, q, k, t, p, spec, phase }),
        Cmd::LpProfile { file, s } => lp_profile(&file, s),
    };
    match res {
        Ok(text) => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}
