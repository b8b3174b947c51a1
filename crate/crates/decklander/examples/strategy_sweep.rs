//! The full landing study: five strategies on the same heaving deck, landing
//! metrics per strategy, and the baseline-relative comparison that motivates
//! putting the impact model inside the prediction horizon.
//!
//! The tracking baseline and the low-restitution prediction models slam into
//! the deck and rebound; prediction restitution at or above the deck's makes
//! the controller brake before touchdown and settle at once.
//!
//! Run with `cargo run --release --example strategy_sweep` (about half a
//! minute; a debug build is much slower).

use decklander::mpc::StrategyVariant;
use decklander::sweep::run_sweep;
use decklander::config::SweepConfig;

fn main() -> decklander::Result<()> {
    let strategies = vec![
        StrategyVariant::TrackingNoLcp,
        StrategyVariant::LcpRestitution(0.0),
        StrategyVariant::LcpRestitution(0.25),
        StrategyVariant::LcpRestitution(0.5),
        StrategyVariant::LcpRestitution(0.75),
    ];
    let mut cfg = SweepConfig::landing_study(strategies, "out/strategy_sweep".into());
    cfg.emit_trajectories = true;
    println!(
        "deck: A = {} m, f = {} Hz, eps = {}; baseline = {}\n",
        cfg.scenario.heave.amplitude,
        cfg.scenario.heave.frequency,
        cfg.scenario.contact.restitution,
        cfg.baseline.as_deref().unwrap_or("-")
    );

    let report = run_sweep(&cfg)?;

    println!(
        "{:<10} {:>9} {:>12} {:>9} {:>8} {:>9}",
        "strategy", "mae_z m", "deflection m", "land s", "rebound", "success"
    );
    for (name, entry) in &report.strategies {
        if let Some(m) = &entry.metrics {
            println!(
                "{name:<10} {:>9.5} {:>12} {:>9} {:>8} {:>9}",
                m.mae_z,
                m.post_impact_deflection
                    .map(|d| format!("{d:.5}"))
                    .unwrap_or_else(|| "-".into()),
                m.time_to_land
                    .map(|t| format!("{t:.3}"))
                    .unwrap_or_else(|| "-".into()),
                entry
                    .rebound
                    .map(|b| if b { "yes" } else { "no" }.to_string())
                    .unwrap_or_else(|| "-".into()),
                m.success
            );
        } else {
            println!("{name:<10} FAILED: {}", entry.error.as_deref().unwrap_or("?"));
        }
    }

    println!("\nversus the {} baseline:", report.baseline.as_deref().unwrap_or("-"));
    for (name, c) in &report.comparisons {
        let reduction = c
            .deflection_reduction_pct
            .map(|p| format!("{p:+.1}%"))
            .unwrap_or_else(|| "-".into());
        println!(
            "  {name:<10} mae {:+.5} m, deflection reduction {reduction}",
            c.mae_delta
        );
    }

    println!("\nreport -> {}", cfg.output_dir.join("metrics.json").display());
    println!("trajectories -> {}/<strategy>.csv", cfg.output_dir.display());
    Ok(())
}
