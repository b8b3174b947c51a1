//! JSON scenario/sweep configuration.
//!
//! One JSON document describes a whole sweep: the physical scenario, the
//! controller tuning, the strategy list, and the output options. Every field
//! is optional except the deck motion — a minimal document is
//!
//! ```json
//! { "deck": { "amplitude": 0.1, "frequency": 1.5, "phase": 1.9634954 } }
//! ```
//!
//! which materializes all defaults: the standard vehicle, the landing-study
//! controller tuning, the five-strategy comparison set (pure tracking plus
//! contact-aware prediction at restitution 0, 0.25, 0.5, 0.75), and a deck
//! restitution of 0.5. Units are SI throughout; angles are radians.
//!
//! Unknown keys are a hard error, and every parse error names the offending
//! key path and what was expected there.

use std::path::PathBuf;

use nalgebra::{Matrix2, Matrix6, Vector2, Vector3, Vector6};
use serde::Deserialize;

use crate::contact::ContactParams;
use crate::dynamics::{State, VehicleParams};
use crate::heave::HeaveModel;
use crate::mpc::{MpcConfig, StrategyVariant};
use crate::sim::{MetricsParams, Scenario};
use crate::{Error, Result};

/// A fully validated sweep: the base scenario, the strategies to compare,
/// and the output options. Produced by [`parse_config`]; consumed by
/// [`crate::sweep::run_sweep`].
#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Base scenario; its `mpc.strategy` is a placeholder that
    /// [`Self::scenario_for`] replaces per strategy.
    pub scenario: Scenario,
    /// Strategies to run, in configured order.
    pub strategies: Vec<StrategyVariant>,
    /// Directory the trajectory CSVs and the metrics report go to.
    pub output_dir: PathBuf,
    /// Write one trajectory CSV per strategy.
    pub emit_trajectories: bool,
    /// Strategy name the report's comparison section is computed against.
    pub baseline: Option<String>,
    /// Recorded in the report for reproduction tooling. The pipeline itself
    /// is deterministic and uses no randomness.
    pub seed: u64,
}

impl SweepConfig {
    /// The scenario one strategy actually runs: the base scenario with the
    /// prediction strategy swapped in (prediction-side restitution follows
    /// the strategy; the plant keeps the deck's).
    pub fn scenario_for(&self, strategy: StrategyVariant) -> Scenario {
        let mut sc = self.scenario.clone();
        sc.mpc.strategy = strategy;
        sc.mpc.contact = sc.contact;
        if let StrategyVariant::LcpRestitution(e) = strategy {
            sc.mpc.contact.restitution = e;
        }
        sc
    }

    /// The landing-study sweep over the given strategies with all-default
    /// physics, writing to `output_dir`.
    pub fn landing_study(strategies: Vec<StrategyVariant>, output_dir: PathBuf) -> Self {
        let baseline = strategies
            .iter()
            .find(|s| matches!(s, StrategyVariant::TrackingNoLcp))
            .map(|s| s.name());
        Self {
            scenario: Scenario::landing_study(StrategyVariant::LcpRestitution(0.5)),
            strategies,
            output_dir,
            emit_trajectories: false,
            baseline,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.strategies.is_empty() {
            return Err(Error::InvalidParameter(
                "strategies: at least one strategy is required".into(),
            ));
        }
        let mut names: Vec<String> = Vec::with_capacity(self.strategies.len());
        for s in &self.strategies {
            s.validate()?;
            let name = s.name();
            if names.contains(&name) {
                return Err(Error::InvalidParameter(format!(
                    "strategies: duplicate strategy `{name}`"
                )));
            }
            names.push(name);
        }
        if let Some(b) = &self.baseline {
            if !names.iter().any(|n| n == b) {
                return Err(Error::InvalidParameter(format!(
                    "baseline: `{b}` is not among the configured strategies ({})",
                    names.join(", ")
                )));
            }
        }
        Ok(())
    }
}

/// Parses and fully validates a JSON sweep document, materializing every
/// default. Errors name the offending key path.
pub fn parse_config(text: &str) -> Result<SweepConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: Document = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            Error::Config(inner.to_string())
        } else {
            Error::Config(format!("{path}: {inner}"))
        }
    })?;
    let cfg = doc.materialize()?;
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    #[serde(default)]
    vehicle: VehicleSection,
    deck: DeckSection,
    #[serde(default)]
    contact: ContactSection,
    #[serde(default)]
    mpc: MpcSection,
    #[serde(default)]
    simulation: SimulationSection,
    #[serde(default)]
    metrics: MetricsSection,
    #[serde(default)]
    strategies: Option<Vec<StrategySpec>>,
    #[serde(default)]
    output: OutputSection,
    #[serde(default)]
    seed: u64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct VehicleSection {
    mass: Option<f64>,
    inertia: Option<f64>,
    gravity: Option<f64>,
    /// [T_min, T_max] (N).
    thrust_bounds: Option<[f64; 2]>,
    /// [tau_min, tau_max] (N m).
    torque_bounds: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeckSection {
    /// Heave amplitude A (m).
    amplitude: f64,
    /// Heave frequency f (Hz).
    frequency: f64,
    /// Heave phase offset (rad).
    phase: f64,
    /// Deck restitution the plant applies at impact.
    restitution: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContactSection {
    /// Rest threshold (m/s).
    v_rest: Option<f64>,
    /// Activation/penetration tolerance (m).
    g_tol: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct MpcSection {
    horizon: Option<usize>,
    dt: Option<f64>,
    /// Diagonal of the state tracking weight Q.
    q_diag: Option<[f64; 6]>,
    /// Diagonal of the input weight R.
    r_diag: Option<[f64; 2]>,
    restitution_weight: Option<f64>,
    smoothing: Option<f64>,
    max_iterations: Option<usize>,
    tolerance: Option<f64>,
    reseed: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulationSection {
    t_end: Option<f64>,
    plant_dt: Option<f64>,
    control_period: Option<f64>,
    /// Initial state [x, z, theta, xdot, zdot, thetadot].
    initial_state: Option<[f64; 6]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetricsSection {
    settle_window: Option<f64>,
    /// Largest post-impact deflection a successful landing may show (m).
    success_threshold: Option<f64>,
    landed_gap_factor: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case", deny_unknown_fields)]
enum StrategySpec {
    /// Free-flight prediction, tracking cost only.
    Tracking,
    /// Contact-aware prediction assuming this restitution.
    Lcp { restitution: f64 },
}

impl StrategySpec {
    fn variant(&self) -> StrategyVariant {
        match self {
            Self::Tracking => StrategyVariant::TrackingNoLcp,
            Self::Lcp { restitution } => StrategyVariant::LcpRestitution(*restitution),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    directory: Option<PathBuf>,
    emit_trajectories: Option<bool>,
    baseline: Option<String>,
}

/// The five-strategy landing-study comparison set.
pub fn default_strategies() -> Vec<StrategyVariant> {
    vec![
        StrategyVariant::TrackingNoLcp,
        StrategyVariant::LcpRestitution(0.0),
        StrategyVariant::LcpRestitution(0.25),
        StrategyVariant::LcpRestitution(0.5),
        StrategyVariant::LcpRestitution(0.75),
    ]
}

impl Document {
    fn materialize(self) -> Result<SweepConfig> {
        let mut vehicle = VehicleParams::default();
        if let Some(v) = self.vehicle.mass {
            vehicle.mass = v;
        }
        if let Some(v) = self.vehicle.inertia {
            vehicle.inertia = v;
        }
        if let Some(v) = self.vehicle.gravity {
            vehicle.gravity = v;
        }
        if let Some([lo, hi]) = self.vehicle.thrust_bounds {
            vehicle.thrust_bounds = (lo, hi);
        }
        if let Some([lo, hi]) = self.vehicle.torque_bounds {
            vehicle.torque_bounds = (lo, hi);
        }

        let deck_restitution = self.deck.restitution.unwrap_or(0.5);
        let heave = HeaveModel {
            amplitude: self.deck.amplitude,
            frequency: self.deck.frequency,
            phase: self.deck.phase,
            restitution: deck_restitution,
        };

        let mut contact = ContactParams {
            restitution: deck_restitution,
            ..ContactParams::default()
        };
        if let Some(v) = self.contact.v_rest {
            contact.v_rest = v;
        }
        if let Some(v) = self.contact.g_tol {
            contact.g_tol = v;
        }

        // Controller defaults are the landing-study tuning; the strategy
        // slot is a placeholder that scenario_for replaces per run.
        let mut mpc = MpcConfig::landing_study(StrategyVariant::LcpRestitution(0.5));
        if let Some(v) = self.mpc.horizon {
            mpc.horizon = v;
        }
        if let Some(v) = self.mpc.dt {
            mpc.dt = v;
        }
        if let Some(d) = self.mpc.q_diag {
            mpc.q_weight = Matrix6::from_diagonal(&Vector6::from_column_slice(&d));
        }
        if let Some(d) = self.mpc.r_diag {
            mpc.r_weight = Matrix2::from_diagonal(&Vector2::from_column_slice(&d));
        }
        if let Some(v) = self.mpc.restitution_weight {
            mpc.restitution_weight = v;
        }
        if let Some(v) = self.mpc.smoothing {
            mpc.smoothing = v;
        }
        if let Some(v) = self.mpc.max_iterations {
            mpc.max_iterations = v;
        }
        if let Some(v) = self.mpc.tolerance {
            mpc.tolerance = v;
        }
        if let Some(v) = self.mpc.reseed {
            mpc.reseed = v;
        }

        let mut metrics = MetricsParams::default();
        if let Some(v) = self.metrics.settle_window {
            metrics.settle_window = v;
        }
        if let Some(v) = self.metrics.success_threshold {
            metrics.deflection_threshold = v;
        }
        if let Some(v) = self.metrics.landed_gap_factor {
            metrics.landed_gap_factor = v;
        }

        let mut scenario = Scenario {
            vehicle,
            heave,
            contact,
            mpc,
            metrics,
            ..Scenario::default()
        };
        if let Some(v) = self.simulation.t_end {
            scenario.t_end = v;
        }
        if let Some(v) = self.simulation.plant_dt {
            scenario.plant_dt = v;
        }
        if let Some(v) = self.simulation.control_period {
            scenario.control_period = v;
        }
        if let Some([x, z, th, xd, zd, thd]) = self.simulation.initial_state {
            scenario.initial_state =
                State::new(Vector3::new(x, z, th), Vector3::new(xd, zd, thd));
        }

        let strategies = match self.strategies {
            None => default_strategies(),
            Some(list) => list.iter().map(StrategySpec::variant).collect(),
        };

        Ok(SweepConfig {
            scenario,
            strategies,
            output_dir: self.output.directory.unwrap_or_else(|| PathBuf::from("out")),
            emit_trajectories: self.output.emit_trajectories.unwrap_or(false),
            baseline: self.output.baseline,
            seed: self.seed,
        })
    }
}
