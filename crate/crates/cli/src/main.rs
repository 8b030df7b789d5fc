//! Experiment runner for the teleportation simulator: figure datasets,
//! resource diagnostics, quadrature-protocol sweeps and Monte Carlo
//! trials, as CSV or JSON.
//!
//! Exit codes: 0 success; 1 a paired numeric/closed-form column broke its
//! tolerance; 2 bad configuration or usage; 3 computation error (e.g.
//! truncation overflow or grid coverage); 4 I/O failure. Settings layer
//! as defaults < config file < CVTELEPORT_* environment < flags.

mod commands;
mod config;
mod output;

use std::io::Write;

use clap::{Parser, Subcommand};

use commands::CommandOutput;
use config::{CommonArgs, Defaults};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Compute(cvteleport::Error),
    Io(std::io::Error),
}

impl From<cvteleport::Error> for CliError {
    fn from(e: cvteleport::Error) -> Self {
        CliError::Compute(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

#[derive(Parser)]
#[command(
    name = "cvteleport",
    version,
    about = "Continuous-variable teleportation simulator over a two-mode squeezed vacuum",
    after_help = "Settings resolve as: defaults < --config file < CVTELEPORT_* env < flags.\n\
                  Exit codes: 0 ok, 1 tolerance breach, 2 config error, 3 compute error, 4 I/O."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Outcome distribution of the photon-number-difference measurement
    /// for a coherent target (numeric vs closed form)
    Figure1(CommonArgs),
    /// Fidelity of the displaced output per outcome (numeric vs closed form)
    Figure2(CommonArgs),
    /// Fidelity per outcome when the output is left undisplaced
    Figure3(CommonArgs),
    /// Resource diagnostics: squeezed EPR variance and the agreement of
    /// the two resource constructions, per r
    ResourceCheck(CommonArgs),
    /// Corrected quadrature-protocol fidelity over r and a set of
    /// measurement outcomes
    QuadSweep(CommonArgs),
    /// Monte Carlo number/phase teleportation trials, one JSON line each
    McRun(CommonArgs),
}

const FIGURE1_DEFAULTS: Defaults = Defaults { alpha: 6.0, lambda: 0.99, rs: &[1.0] };
const FIGURE2_DEFAULTS: Defaults = Defaults { alpha: 6.0, lambda: 0.9, rs: &[1.0] };
const FIGURE3_DEFAULTS: Defaults = Defaults { alpha: 6.0, lambda: 0.9, rs: &[1.0] };
const RESOURCE_DEFAULTS: Defaults = Defaults { alpha: 6.0, lambda: 0.99, rs: &[0.25, 0.5, 1.0, 1.5] };
const QUAD_DEFAULTS: Defaults = Defaults { alpha: 1.0, lambda: 0.99, rs: &[0.5, 1.0, 1.5, 2.0] };
const MC_DEFAULTS: Defaults = Defaults { alpha: 2.0, lambda: 0.8, rs: &[1.0] };

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli));
}

type Runner = fn(&config::RunConfig) -> Result<CommandOutput, CliError>;

fn run(cli: Cli) -> i32 {
    let (args, defaults, runner): (&CommonArgs, &Defaults, Runner) =
        match &cli.command {
            Command::Figure1(a) => (a, &FIGURE1_DEFAULTS, commands::figure1),
            Command::Figure2(a) => (a, &FIGURE2_DEFAULTS, commands::figure2),
            Command::Figure3(a) => (a, &FIGURE3_DEFAULTS, commands::figure3),
            Command::ResourceCheck(a) => (a, &RESOURCE_DEFAULTS, commands::resource_check),
            Command::QuadSweep(a) => (a, &QUAD_DEFAULTS, commands::quad_sweep),
            Command::McRun(a) => (a, &MC_DEFAULTS, commands::mc_run),
        };

    let cfg = match config::resolve(args, defaults) {
        Ok(cfg) => cfg,
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            return 2;
        }
        Err(_) => unreachable!("resolve only reports config errors"),
    };

    let result = runner(&cfg);
    match result {
        Ok(CommandOutput { body, breaches }) => {
            if let Err(e) = emit(&cfg, &body) {
                eprintln!("i/o error: {e}");
                return 4;
            }
            if breaches.is_empty() {
                0
            } else {
                for b in &breaches {
                    eprintln!("tolerance breach: {b}");
                }
                1
            }
        }
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            2
        }
        Err(CliError::Compute(e)) => {
            eprintln!("computation error: {e}");
            3
        }
        Err(CliError::Io(e)) => {
            eprintln!("i/o error: {e}");
            4
        }
    }
}

fn emit(cfg: &config::RunConfig, body: &str) -> std::io::Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, body),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(body.as_bytes())
        }
    }
}
