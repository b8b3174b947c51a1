//! Thin command-line front end over [`decklander::sweep::run_sweep`].
//!
//! Reads a JSON sweep configuration, applies any command-line overrides,
//! runs every configured strategy, writes `metrics.json` (and per-strategy
//! trajectory CSVs when requested) to the output directory, and prints a
//! one-line summary per strategy.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use decklander::sweep::{run_sweep, summary_lines};

#[derive(Parser, Debug)]
#[command(
    name = "decklander",
    about = "Heaving-deck landing study: simulate the configured control \
             strategies and report landing metrics."
)]
struct Cli {
    /// Path to the JSON sweep configuration.
    config: PathBuf,

    /// Directory the report (and trajectories) are written to.
    #[arg(long)]
    output_dir: Option<PathBuf>,

    /// Run only these strategies (repeatable); names as in the report,
    /// e.g. `tracking` or `lcp-0.50`.
    #[arg(long = "strategy")]
    strategies: Vec<String>,

    /// Override the configured seed recorded in the report.
    #[arg(long)]
    seed: Option<u64>,

    /// Write one plant-rate trajectory CSV per strategy.
    #[arg(long)]
    emit_trajectories: bool,

    /// Strategy name the comparison columns are measured against.
    #[arg(long)]
    baseline: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> decklander::Result<()> {
    let text = std::fs::read_to_string(&cli.config)?;
    let mut cfg = decklander::config::parse_config(&text)?;

    if !cli.strategies.is_empty() {
        for name in &cli.strategies {
            if !cfg.strategies.iter().any(|s| &s.name() == name) {
                let known: Vec<String> =
                    cfg.strategies.iter().map(|s| s.name()).collect();
                return Err(decklander::Error::Config(format!(
                    "--strategy {name}: not in the configuration (configured: {})",
                    known.join(", ")
                )));
            }
        }
        cfg.strategies.retain(|s| cli.strategies.contains(&s.name()));
        // A filtered-out baseline would make every comparison impossible;
        // drop it unless it survived the filter (or is re-overridden below).
        if let Some(b) = &cfg.baseline {
            if !cli.strategies.contains(b) {
                cfg.baseline = None;
            }
        }
    }
    if let Some(dir) = cli.output_dir {
        cfg.output_dir = dir;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.emit_trajectories {
        cfg.emit_trajectories = true;
    }
    if let Some(baseline) = cli.baseline {
        cfg.baseline = Some(baseline);
    }
    cfg.validate()?;

    let report = run_sweep(&cfg)?;
    for line in summary_lines(&report) {
        println!("{line}");
    }
    println!("report: {}", cfg.output_dir.join("metrics.json").display());
    Ok(())
}
