//! One closed-loop landing on the heaving deck with the contact-aware MPC
//! (prediction restitution 0.5, the proposed configuration), narrated through
//! its milestones, with the full plant-rate trajectory written to CSV.
//!
//! Run with `cargo run --release --example mpc_landing`.

use decklander::dynamics::VehicleParams;
use decklander::mpc::StrategyVariant;
use decklander::sim::{simulate, Scenario};
use decklander::sweep::write_trajectory_csv;

fn main() -> decklander::Result<()> {
    let strategy = StrategyVariant::LcpRestitution(0.5);
    let scenario = Scenario::landing_study(strategy);
    println!(
        "strategy {}: horizon {} x {} s, replanning every {} s, deck eps = {}",
        strategy.name(),
        scenario.mpc.horizon,
        scenario.mpc.dt,
        scenario.control_period,
        scenario.contact.restitution
    );
    println!(
        "release {} m above the mean deck, {} s run at {} kHz\n",
        scenario.initial_state.z(),
        scenario.t_end,
        1e-3 / scenario.plant_dt
    );

    let result = simulate(&scenario)?;
    let m = result.metrics;
    let hover = VehicleParams::default().hover_thrust();

    // Milestones out of the log: first braking burst, touchdown, settle.
    let first_brake = result
        .rows
        .iter()
        .find(|r| r.zdot < 0.0 && r.thrust > hover)
        .map(|r| r.t);
    println!("milestones:");
    match first_brake {
        Some(t) => println!("  braking flare (T > m*g while descending) at t = {t:.3} s"),
        None => println!("  no braking burst above hover thrust"),
    }
    match (m.first_impact_time, m.pre_impact_relative_velocity) {
        (Some(t), Some(v)) => {
            println!("  first touchdown at t = {t:.3} s, closing at {:.3} m/s", -v)
        }
        _ => println!("  never touched down"),
    }
    match m.time_to_land {
        Some(t) => println!("  settled on the deck from t = {t:.3} s"),
        None => println!("  never settled"),
    }

    println!("\nmetrics:");
    println!("  mae_z | gap |             = {:.5} m", m.mae_z);
    println!(
        "  post-impact deflection    = {} m",
        m.post_impact_deflection
            .map(|d| format!("{d:.6}"))
            .unwrap_or_else(|| "-".into())
    );
    println!("  total normal impulse      = {:.5} N s", m.impulse_total);
    println!("  success (deflection <= {:.0e}) = {}", scenario.metrics.deflection_threshold, m.success);

    // Solver health across the run.
    let solves = result.solves.len();
    let converged = result.solves.iter().filter(|s| s.solver_flag == 0).count();
    let max_iters = result.solves.iter().map(|s| s.iterations).max().unwrap_or(0);
    println!("\nsolver: {solves} replans, {converged} fully converged, max {max_iters} iterations");

    let out = std::path::Path::new("out");
    std::fs::create_dir_all(out)?;
    let csv = out.join("mpc_landing.csv");
    write_trajectory_csv(&csv, &result.rows)?;
    println!("trajectory ({} rows) -> {}", result.rows.len(), csv.display());

    assert!(m.success, "study landing should succeed");
    Ok(())
}
