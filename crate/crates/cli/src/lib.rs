//! Command-line orchestration for critquench experiments: configuration,
//! simulation runs, series files with digests, and collapse/crossing reports.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod validate;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "critquench", version, about = "Critical field quenches and data-collapse analysis")]
pub struct Cli {
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides output.dir.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Master seed; overrides simulation.seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores); overrides simulation.threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Dotted-path config override, e.g. `lattice.sizes=[8,12]`. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Glauber quench ensembles, one series per (L, h).
    SimulateClassical,
    /// Exact quantum quenches, one series per (L, h).
    SimulateQuantum,
    /// Estimate w from a set of series files or directories.
    AnalyzeCollapse { inputs: Vec<PathBuf> },
    /// Relative spread across sizes at fixed h and w.
    AnalyzeCrossing {
        inputs: Vec<PathBuf>,
        #[arg(long)]
        w: Option<f64>,
    },
    /// Series that collapse exactly at a chosen w.
    MakeSynthetic,
    /// Run the built-in invariant checks.
    Validate,
}

fn load_config(cli: &Cli) -> CliResult<Option<ExperimentConfig>> {
    let Some(path) = &cli.config else {
        return Ok(None);
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut overrides = cli.overrides.clone();
    if let Some(seed) = cli.seed {
        overrides.push(format!("simulation.seed={seed}"));
    }
    if let Some(threads) = cli.threads {
        overrides.push(format!("simulation.threads={threads}"));
    }
    if let Some(out) = &cli.out {
        overrides.push(format!("output.dir={}", toml::Value::String(out.display().to_string())));
    }
    ExperimentConfig::load(&text, &overrides).map(Some)
}

#[cfg(feature = "parallel")]
fn configure_threads(threads: usize) {
    if threads > 0 {
        // Fails only if a pool already exists, in which case it is reused.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_threads: usize) {}

/// Execute a parsed command line.
pub fn run(cli: &Cli) -> CliResult<()> {
    let config = load_config(cli)?;
    let needs = |what: &str| CliError::Config(format!("{what} requires --config"));
    let out_dir = cli
        .out
        .clone()
        .or_else(|| config.as_ref().map(|c| PathBuf::from(&c.output.dir)))
        .unwrap_or_else(|| PathBuf::from("out"));
    configure_threads(cli.threads.or(config.as_ref().map(|c| c.simulation.threads)).unwrap_or(0));
    match &cli.command {
        Command::SimulateClassical => {
            let m = commands::simulate_classical(config.as_ref().ok_or_else(|| needs("simulate-classical"))?, &out_dir)?;
            println!("wrote {} series to {} in {:.1}s", m.counts.len(), out_dir.display(), m.wall_clock_seconds);
        }
        Command::SimulateQuantum => {
            let m = commands::simulate_quantum(config.as_ref().ok_or_else(|| needs("simulate-quantum"))?, &out_dir)?;
            println!("wrote {} series to {} in {:.1}s", m.counts.len(), out_dir.display(), m.wall_clock_seconds);
        }
        Command::MakeSynthetic => {
            let m = commands::make_synthetic_cmd(config.as_ref().ok_or_else(|| needs("make-synthetic"))?, &out_dir)?;
            println!("wrote {} synthetic series to {}", m.counts.len(), out_dir.display());
        }
        Command::AnalyzeCollapse { inputs } => {
            let r = commands::analyze_collapse(config.as_ref(), inputs, &out_dir)?;
            let res = &r.result;
            println!(
                "w_rep = {:.4}  sigma_sys = {:.4}  band = [{:.4}, {:.4}] (k = {})  accepted windows {}/{}",
                res.w_rep,
                res.sigma_sys,
                res.band.0,
                res.band.1,
                res.k,
                res.accepted().count(),
                res.estimates.len()
            );
        }
        Command::AnalyzeCrossing { inputs, w } => {
            let r = commands::analyze_crossing(config.as_ref(), inputs, *w, &out_dir)?;
            println!("x_min = {:.4e}  delta_min = {:.4e}  (w = {})", r.diagnostic.x_min, r.diagnostic.delta_min, r.w);
        }
        Command::Validate => {
            let failed = validate::run_checks(std::io::stdout());
            if !failed.is_empty() {
                return Err(CliError::Numerical(format!("{} check(s) failed: {}", failed.len(), failed.join(", "))));
            }
        }
    }
    Ok(())
}
