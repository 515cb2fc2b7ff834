use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use nmwitness::suites::CheckHooks;
use nmwitness::witness::WitnessOptions;
use nmwitness_cli::commands::{cmd_check, cmd_scan, cmd_search, EXIT_ERROR};
use nmwitness_cli::RunConfig;

/// Contractivity witnesses for system-environment dynamics.
#[derive(Parser)]
#[command(name = "nmwitness", version, disable_version_flag = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Overrides {
    /// Forward-difference step
    #[arg(long)]
    h: Option<f64>,
    /// Detection threshold for N_fd and C
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Witness reports over the configured time grid, written as CSV
    Scan {
        #[arg(long)]
        config: PathBuf,
        /// CSV destination; overrides `output` in the config
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Property suites over seeded random instances
    Check {
        /// contractivity, m-negativity, inequality, laine-bound or all
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 200)]
        n: usize,
        /// Optional config supplying the [witness] settings
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, hide = true)]
        corrupt_mu: bool,
    },
    /// Search unitary preparation pairs maximizing N_fd
    Search {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to `search.budget` in the config
        #[arg(long)]
        budget: Option<usize>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print the version
    Version,
}

fn load(path: &Path, overrides: &Overrides) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(h) = overrides.h {
        cfg.witness.h = h;
    }
    if let Some(t) = overrides.threshold {
        cfg.witness.threshold = t;
    }
    if let Some(s) = overrides.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<u8> {
    let mut stdout = io::stdout().lock();
    let mut stderr = io::stderr().lock();
    match cli.command {
        Command::Scan { config, out, overrides } => {
            let mut cfg = load(&config, &overrides)?;
            if out.is_some() {
                cfg.output = out;
            }
            cmd_scan(&cfg, &mut stdout, &mut stderr)
        }
        Command::Check { suite, n, config, overrides, corrupt_mu } => {
            let mut opts = match &config {
                Some(path) => load(path, &overrides)?.options(),
                None => WitnessOptions::default(),
            };
            if let Some(h) = overrides.h {
                opts.h = h;
            }
            if let Some(t) = overrides.threshold {
                opts.threshold = t;
            }
            opts.validate().context("invalid witness options")?;
            let hooks = CheckHooks { erase_mu: corrupt_mu };
            cmd_check(&suite, n, overrides.seed.unwrap_or(0), &opts, hooks, &mut stdout)
        }
        Command::Search { config, budget, overrides } => {
            let cfg = load(&config, &overrides)?;
            let budget = budget.unwrap_or(cfg.search.budget);
            cmd_search(&cfg, budget, &mut stdout)
        }
        Command::Version => {
            writeln!(stdout, "nmwitness {}", env!("CARGO_PKG_VERSION"))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
