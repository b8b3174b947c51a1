//! Deck kinematics demo: the sinusoidal heave model, one period tabulated,
//! plus a finite-difference consistency audit of the analytic derivatives.
//!
//! Run with `cargo run --example heaving_deck`.

use decklander::heave::HeaveModel;

fn main() -> decklander::Result<()> {
    let deck = HeaveModel::default();
    deck.validate()?;

    println!(
        "deck: A = {} m, f = {} Hz, phase = {:.4} rad, eps = {}",
        deck.amplitude, deck.frequency, deck.phase, deck.restitution
    );
    println!(
        "omega = {:.4} rad/s, peak heave rate A*omega = {:.4} m/s\n",
        deck.angular_frequency(),
        deck.velocity_amplitude()
    );

    // One full period, twelve samples.
    let period = 1.0 / deck.frequency;
    println!("{:>8} {:>12} {:>12} {:>12}", "t (s)", "z_plat (m)", "zdot (m/s)", "zddot (m/s^2)");
    for k in 0..=12 {
        let t = period * k as f64 / 12.0;
        let d = deck.deck_state(t);
        println!(
            "{t:>8.4} {:>12.6} {:>12.6} {:>12.6}",
            d.position,
            d.velocity,
            deck.deck_acceleration(t)
        );
    }

    // Central differences must reproduce the analytic rates.
    let h = 1e-6;
    let mut worst_v: f64 = 0.0;
    let mut worst_a: f64 = 0.0;
    for k in 0..1000 {
        let t = 3.0 * k as f64 / 1000.0;
        let num_v = (deck.deck_position(t + h) - deck.deck_position(t - h)) / (2.0 * h);
        let num_a = (deck.deck_velocity(t + h) - deck.deck_velocity(t - h)) / (2.0 * h);
        worst_v = worst_v.max((num_v - deck.deck_velocity(t)).abs());
        worst_a = worst_a.max((num_a - deck.deck_acceleration(t)).abs());
    }
    println!("\nfinite-difference audit over [0, 3] s:");
    println!("  max |d z/dt - zdot|      = {worst_v:.3e}");
    println!("  max |d zdot/dt - zddot|  = {worst_a:.3e}");
    assert!(worst_v < 1e-6 && worst_a < 1e-5);

    // The static deck degenerates to a fixed plane.
    let still = HeaveModel::static_deck(0.5);
    let d = still.deck_state(1.234);
    println!("\nstatic deck at t = 1.234 s: z = {}, zdot = {}", d.position, d.velocity);
    assert_eq!((d.position, d.velocity), (0.0, 0.0));

    Ok(())
}
