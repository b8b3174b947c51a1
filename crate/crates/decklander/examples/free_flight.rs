//! Rigid-body integrator demo: hover fixed point, ballistic apex convergence,
//! and the energy-drift audit for the semi-implicit Euler plant step.
//!
//! Run with `cargo run --example free_flight`.

use decklander::dynamics::{
    free_step, mechanical_energy, ControlInput, State, VehicleParams,
};
use nalgebra::Vector3;

fn main() -> decklander::Result<()> {
    let p = VehicleParams::default();
    println!("vehicle: m = {} kg, I = {} kg m^2, g = {} m/s^2", p.mass, p.inertia, p.gravity);
    println!("hover thrust m*g = {:.4} N (bounds {:?})\n", p.hover_thrust(), p.thrust_bounds);

    // --- 1. Hover is an exact fixed point of the discrete step. ---------
    let mut s = State::at_rest(0.0, 0.5, 0.0);
    let hover = ControlInput::hover(&p);
    for _ in 0..1000 {
        s = free_step(&s, hover, &p, 1e-3)?;
    }
    println!("hover, 1000 steps @ 1 kHz:");
    println!("  |z - z0|    = {:.3e} m", (s.z() - 0.5).abs());
    println!("  |zdot|      = {:.3e} m/s", s.zdot().abs());

    // --- 2. Ballistic apex: first-order convergence in the step size. ----
    // Launch upward at 1 m/s with zero thrust; the continuous-time apex gain
    // is v^2 / (2 g). The semi-implicit step is first-order accurate, so
    // halving dt should halve the apex error.
    let v0 = 1.0;
    let apex_exact = v0 * v0 / (2.0 * p.gravity);
    println!("\nballistic apex, launch {v0} m/s up (exact gain {apex_exact:.6} m):");
    let mut previous_err = None;
    for dt in [4e-3, 2e-3, 1e-3, 5e-4] {
        let mut s = State::new(Vector3::new(0.0, 0.0, 0.0), Vector3::new(0.0, v0, 0.0));
        let mut apex = s.z();
        while s.zdot() > 0.0 {
            s = free_step(&s, ControlInput::new(0.0, 0.0), &p, dt)?;
            apex = apex.max(s.z());
        }
        let err = (apex - apex_exact).abs();
        let ratio = previous_err
            .map(|prev: f64| format!("{:.2}", prev / err))
            .unwrap_or_else(|| "-".into());
        println!("  dt = {dt:.0e}  apex = {apex:.6} m  |err| = {err:.3e}  halving ratio {ratio}");
        previous_err = Some(err);
    }

    // --- 3. Energy audit: drift under zero thrust stays below 1%. --------
    let mut s = State::new(Vector3::new(0.0, 2.0, 0.0), Vector3::new(0.3, 0.5, 0.0));
    let e0 = mechanical_energy(&s, &p);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        s = free_step(&s, ControlInput::new(0.0, 0.0), &p, 1e-3)?;
        worst = worst.max((mechanical_energy(&s, &p) - e0).abs() / e0.abs());
    }
    println!("\nenergy audit, zero thrust, 1 s @ 1 kHz:");
    println!("  E0 = {e0:.6} J, max relative drift = {:.4e} (budget 1e-2)", worst);
    assert!(worst < 1e-2, "energy drift exceeded 1%");

    // --- 4. Thrust tilts with pitch: torque couples the lateral axis. ----
    let mut s = State::at_rest(0.0, 0.5, 0.0);
    for _ in 0..500 {
        s = free_step(&s, ControlInput::new(p.hover_thrust(), 2e-5), &p, 1e-3)?;
    }
    println!("\npitch coupling, hover thrust + 0.02 mN m torque, 0.5 s:");
    println!("  theta = {:.4} rad, xdot = {:.4} m/s (thrust leans, body drifts)", s.theta(), s.xdot());
    assert!(s.theta() > 0.0 && s.xdot() < 0.0);

    Ok(())
}
