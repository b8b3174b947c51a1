//! Multi-strategy sweep orchestration and file emission.
//!
//! [`run_sweep`] simulates every configured strategy on the shared scenario,
//! writes one trajectory CSV per strategy (plant-rate rows, fixed column
//! order, 9-significant-digit floats) when asked to, always writes a single
//! `metrics.json`, and returns the same report in memory. A strategy whose
//! run aborts is recorded with its error and the sweep continues, so every
//! configured strategy appears in the report exactly once either way.
//!
//! Reruns of the same configuration produce byte-identical files: the
//! closed loop is deterministic and the report's maps are ordered.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::SweepConfig;
use crate::sim::{simulate, LogRow, Metrics};
use crate::Result;

/// Fixed trajectory CSV header (column order is contractual).
pub const CSV_HEADER: &str =
    "t,x,z,theta,xdot,zdot,thetadot,T,tau,z_plat,zdot_plat,g_N,gdot_N,lambda_N,nu_N,solver_flag";

/// One strategy's entry in the report.
#[derive(Debug, Clone, Serialize)]
pub struct StrategyEntry {
    /// Landing metrics; absent when the run aborted.
    pub metrics: Option<Metrics>,
    /// Whether the vehicle rebounded past the success threshold after its
    /// first touchdown; absent when it never touched down or the run aborted.
    pub rebound: Option<bool>,
    /// The abort error, when the run failed.
    pub error: Option<String>,
}

/// Baseline-relative deltas for one strategy (strategy minus baseline).
#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    /// mae_z difference (m).
    pub mae_delta: f64,
    /// Post-impact deflection difference (m); absent unless both runs
    /// touched down.
    pub deflection_delta: Option<f64>,
    /// Deflection reduction relative to the baseline (percent, positive =
    /// this strategy bounced less); absent unless both touched down and the
    /// baseline deflection is nonzero.
    pub deflection_reduction_pct: Option<f64>,
}

/// The sweep report serialized to `metrics.json`.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    /// Echoed from the configuration; the pipeline is deterministic.
    pub seed: u64,
    /// Name of the comparison baseline, when one was configured.
    pub baseline: Option<String>,
    /// Success threshold the `rebound`/`success` flags were evaluated
    /// against (m).
    pub success_threshold: f64,
    /// Per-strategy results, keyed by strategy name.
    pub strategies: BTreeMap<String, StrategyEntry>,
    /// Baseline-relative deltas for every non-baseline strategy with
    /// metrics, keyed by strategy name.
    pub comparisons: BTreeMap<String, Comparison>,
}

/// Runs every configured strategy, writes the output files, and returns the
/// report.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.output_dir)?;

    let threshold = cfg.scenario.metrics.deflection_threshold;
    let mut strategies: BTreeMap<String, StrategyEntry> = BTreeMap::new();

    for &strategy in &cfg.strategies {
        let name = strategy.name();
        let entry = match simulate(&cfg.scenario_for(strategy)) {
            Ok(result) => {
                if cfg.emit_trajectories {
                    write_trajectory_csv(
                        &cfg.output_dir.join(format!("{name}.csv")),
                        &result.rows,
                    )?;
                }
                StrategyEntry {
                    rebound: result
                        .metrics
                        .post_impact_deflection
                        .map(|d| d > threshold),
                    metrics: Some(result.metrics),
                    error: None,
                }
            }
            Err(e) => StrategyEntry {
                metrics: None,
                rebound: None,
                error: Some(e.to_string()),
            },
        };
        strategies.insert(name, entry);
    }

    let mut comparisons: BTreeMap<String, Comparison> = BTreeMap::new();
    if let Some(base_name) = &cfg.baseline {
        if let Some(base) = strategies.get(base_name).and_then(|e| e.metrics) {
            for (name, entry) in &strategies {
                if name == base_name {
                    continue;
                }
                let Some(m) = entry.metrics else { continue };
                let deflection_delta = match (m.post_impact_deflection, base.post_impact_deflection)
                {
                    (Some(s), Some(b)) => Some(s - b),
                    _ => None,
                };
                let deflection_reduction_pct =
                    match (m.post_impact_deflection, base.post_impact_deflection) {
                        (Some(s), Some(b)) if b != 0.0 => Some(100.0 * (b - s) / b),
                        _ => None,
                    };
                comparisons.insert(
                    name.clone(),
                    Comparison {
                        mae_delta: m.mae_z - base.mae_z,
                        deflection_delta,
                        deflection_reduction_pct,
                    },
                );
            }
        }
    }

    let report = SweepReport {
        seed: cfg.seed,
        baseline: cfg.baseline.clone(),
        success_threshold: threshold,
        strategies,
        comparisons,
    };
    write_report(&cfg.output_dir.join("metrics.json"), &report)?;
    Ok(report)
}

/// Writes the plant-rate trajectory log with the contractual column order
/// and 9-significant-digit floats.
pub fn write_trajectory_csv(path: &Path, rows: &[LogRow]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{}",
            r.t,
            r.x,
            r.z,
            r.theta,
            r.xdot,
            r.zdot,
            r.thetadot,
            r.thrust,
            r.torque,
            r.z_plat,
            r.zdot_plat,
            r.gap,
            r.gap_rate,
            r.impulse,
            r.residual,
            r.solver_flag
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the report as pretty-printed JSON with a trailing newline.
pub fn write_report(path: &Path, report: &SweepReport) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, report)
        .map_err(|e| crate::Error::Config(format!("serializing report: {e}")))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Formats one report line per strategy for terminal output.
pub fn summary_lines(report: &SweepReport) -> Vec<String> {
    let mut lines = Vec::new();
    for (name, entry) in &report.strategies {
        let line = match (&entry.metrics, &entry.error) {
            (Some(m), _) => {
                let defl = m
                    .post_impact_deflection
                    .map_or("-".to_string(), |d| format!("{d:.4}"));
                let ttl = m
                    .time_to_land
                    .map_or("-".to_string(), |t| format!("{t:.3}"));
                format!(
                    "{name:<10} mae_z {:.4}  deflection {defl}  time_to_land {ttl}  success {}",
                    m.mae_z, m.success
                )
            }
            (None, Some(e)) => format!("{name:<10} FAILED: {e}"),
            (None, None) => format!("{name:<10} (no result)"),
        };
        lines.push(line);
    }
    lines
}

/// Output file names a sweep produces for a strategy name.
pub fn trajectory_filename(strategy_name: &str) -> PathBuf {
    PathBuf::from(format!("{strategy_name}.csv"))
}
