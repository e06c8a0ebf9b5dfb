//! Command-line front end: `minimize`, `constants`, `sweep`, `verify` and `bumps`.

mod commands;
pub mod config;
mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

pub use config::{parse_run_config, RunConfig};
pub use verify::{Suite, VerifySummary};

#[derive(Parser, Debug)]
#[command(name = "spss", version, about = "Radial ground states of the Schrödinger–Poisson–Slater energy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimize the energy at fixed (alpha, coupling, mass); writes a JSON report and the field CSV.
    Minimize(RunConfig),
    /// Estimate the interpolation constants and thresholds at one alpha; writes JSON.
    Constants(RunConfig),
    /// Classify a grid of (alpha, coupling, mass) points; writes CSV.
    Sweep(RunConfig),
    /// Run a named verification suite; writes a JSON summary, exit 1 if any check fails.
    Verify(RunConfig),
    /// Multi-bump test-function scan for 1/3 <= alpha < 1/2; writes CSV.
    Bumps(RunConfig),
}

/// Runs the tool on `args` (program name first) and returns the process exit code.
///
/// 0 on success, 1 on usage or input errors and failed verification, 2 when a solve hits the
/// iteration limit.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let seed_env = std::env::var(config::SEED_ENV).ok();
    let (name, cfg) = match cli.command {
        Command::Minimize(c) => ("minimize", c),
        Command::Constants(c) => ("constants", c),
        Command::Sweep(c) => ("sweep", c),
        Command::Verify(c) => ("verify", c),
        Command::Bumps(c) => ("bumps", c),
    };
    let outcome = cfg.resolve(name, seed_env.as_deref()).and_then(|cfg| match name {
        "minimize" => commands::minimize(&cfg),
        "constants" => commands::constants(&cfg),
        "sweep" => commands::sweep(&cfg),
        "verify" => commands::verify(&cfg),
        _ => commands::bumps(&cfg),
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

/// Writes to `path`, or to standard output when absent.
pub(crate) fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
