//! Library side of the `gzk` binary: configuration parsing and the four
//! subcommands, each returning an exit code.

pub mod commands;
pub mod config;

pub use commands::{lp_profile, norms, simulate, verify, Failure, NormOpts, SimulateOpts, VerifyOpts};
pub use config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;
pub const EXIT_GATE: i32 = 4;
pub const EXIT_BREACH: i32 = 5;
