//! Planar multirotor landing on a heaving deck.
//!
//! This crate simulates a planar (x, z, pitch) multirotor touching down on a
//! vertically oscillating platform and provides a receding-horizon MPC whose
//! prediction model embeds the impact itself: a velocity-level linear
//! complementarity problem (LCP) with Newton's restitution law. Because the
//! contact/impact map is inside the prediction, the controller can reason
//! about rebound before it happens and shape the approach accordingly.
//!
//! The pieces compose bottom-up:
//!
//! * [`dynamics`] - rigid-body model, semi-implicit Euler integration.
//! * [`heave`] - sinusoidal deck motion (position, velocity, restitution).
//! * [`contact`] - gap/gap-rate, scalar LCP assembly and closed-form solve,
//!   an independent enumerative oracle, and the contact-resolving plant step.
//! * [`mpc`] - single-shooting rollout, tracking + restitution costs, and a
//!   projected quasi-Newton solver over the box-bounded input sequence.
//! * [`sim`] - closed-loop plant/controller harness and landing metrics.
//! * [`config`] / [`sweep`] - JSON scenario configs, multi-strategy sweeps,
//!   trajectory CSV and metrics JSON emission.
//!
//! Each capability has a runnable demo under `examples/`:
//!
//! ```text
//! cargo run --example free_flight      # integrator + hover fixed point
//! cargo run --example heaving_deck     # deck kinematics table
//! cargo run --example lcp_closed_form  # closed-form LCP vs enumerative oracle
//! cargo run --example drop_test        # restitution law from plant drop tests
//! cargo run --example mpc_landing      # one closed-loop landing, CSV output
//! cargo run --example strategy_sweep   # five-strategy comparison study
//! ```
//!
//! The `decklander` binary is a thin CLI over [`config::parse_config`] and
//! [`sweep`]: point it at a JSON scenario file and it writes per-strategy
//! trajectory CSVs plus a metrics report.

pub mod config;
pub mod contact;
pub mod dynamics;
pub mod heave;
pub mod mpc;
pub mod sim;
pub mod sweep;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or configuration value failed validation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// A scenario/config document could not be parsed or materialized.
    #[error("config error: {0}")]
    Config(String),
    /// The plant state left the representable range mid-simulation.
    #[error("non-finite state at t = {t:.6} s: {detail}")]
    NonFiniteState { t: f64, detail: String },
    /// A metric that needs a touchdown was asked of a trajectory without one.
    #[error("no touchdown recorded in trajectory")]
    NoTouchdown,
    /// Filesystem failure while writing sweep outputs.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
