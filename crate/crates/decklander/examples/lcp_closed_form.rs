//! Scalar contact LCP demo: the closed-form solve, the independent
//! enumerative oracle, and their exact agreement across a parameter grid.
//!
//! The impact problem is 0 <= lambda  perp  R*lambda + u >= 0 with
//! R = 1/m > 0 and u = (1 + eps) * (approach rate). The closed form is
//! lambda = max(0, -u/R); the oracle instead enumerates both
//! complementarity branches and keeps the feasible one.
//!
//! Run with `cargo run --example lcp_closed_form`.

use decklander::contact::{
    assemble_lcp, restitution_residual, solve_lcp_oracle, solve_lcp_scalar, ContactParams,
};
use decklander::dynamics::VehicleParams;
use nalgebra::Vector3;

fn main() -> decklander::Result<()> {
    // --- The three regimes, on physical numbers. -------------------------
    let p = VehicleParams::default();
    let r = 1.0 / p.mass;
    println!("R = 1/m = {r:.4} (m kg)^-1\n");
    println!(
        "{:>22} {:>12} {:>12} {:>10}",
        "case", "u (m/s)", "lambda (Ns)", "w (m/s)"
    );
    for (label, u) in [
        ("approach 1 m/s, eps=.5", -1.5),
        ("approach 1 m/s, eps=0", -1.0),
        ("grazing", 0.0),
        ("separating 0.3 m/s", 0.45),
    ] {
        let lambda = solve_lcp_scalar(r, u)?;
        let w = restitution_residual(r, u, lambda);
        println!("{label:>22} {u:>12.4} {lambda:>12.6} {w:>10.4}");
    }

    // An active impact at eps = 0.5 reverses half the approach speed:
    // lambda = m (1 + eps) |gdot-| = 0.03 * 1.5 * 1.0 = 0.045 N s.
    let cp = ContactParams::with_restitution(0.5);
    let qdot = Vector3::new(0.0, -1.0, 0.0); // closing at 1 m/s
    let (r2, u2) = assemble_lcp(&qdot, &qdot, 0.0, &cp, &p)?;
    let lambda = solve_lcp_scalar(r2, u2)?;
    println!("\nassembled from m = {} kg, eps = {}:", p.mass, cp.restitution);
    println!("  (R, u) = ({r2:.4}, {u2:.4}) -> lambda = {lambda:.6} N s");
    println!("  velocity kick lambda/m = {:.4} m/s (from -1.0 to +0.5)", lambda / p.mass);
    assert!((lambda - 0.045).abs() < 1e-15);

    // --- Grid audit: closed form vs oracle, bit for bit. -----------------
    let mut checked = 0usize;
    let mut max_triple: f64 = 0.0;
    for i in 0..200 {
        // R spans 1e-1 .. 1e3 on a log grid, four decades around the
        // physical 1/m ~ 33.
        let r = 1e-1 * 10f64.powf(4.0 * i as f64 / 199.0);
        for j in 0..200 {
            let u = -10.0 + 20.0 * j as f64 / 199.0;
            let a = solve_lcp_scalar(r, u)?;
            let b = solve_lcp_oracle(r, u)?;
            assert_eq!(a.to_bits(), b.to_bits(), "routes disagree at R={r}, u={u}");
            let w = restitution_residual(r, u, a);
            assert!(a >= 0.0, "negative impulse at R={r}, u={u}");
            assert!(w >= -1e-12 * u.abs().max(1.0), "negative residual at R={r}, u={u}");
            max_triple = max_triple.max((a * w).abs());
            checked += 1;
        }
    }
    println!("\ngrid audit: {checked} (R, u) pairs");
    println!("  closed form == oracle bitwise everywhere");
    println!("  max |lambda * w| = {max_triple:.3e} (complementarity)");
    assert!(max_triple <= 1e-12);

    Ok(())
}
