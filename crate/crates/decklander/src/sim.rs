//! Closed-loop landing simulation: the controller runs at a fixed replanning
//! period while the plant integrates the contact dynamics at a finer step,
//! holding each commanded input constant between solves (zero-order hold).
//!
//! The plant and the prediction model share one contact kernel; they may
//! still disagree about restitution — the whole point of the strategy sweep
//! is to measure what that disagreement costs.
//!
//! # Log conventions
//!
//! Row `k` holds the plant state at `t_k = k * plant_dt`, the deck state at
//! `t_k`, and the impulse/residual of the plant step that *produced* this
//! state (the step from `t_{k-1}`; zeros on row 0). The input columns hold
//! the zero-order-hold input in force starting at `t_k`, and the solver flag
//! is the most recent solve's status. Consequence: at the first row whose
//! impulse is positive, the *previous* row's `gap_rate` is exactly the
//! pre-impact relative velocity the impact law acted on.

use serde::Serialize;

use crate::contact::{contact_step, gap, gap_rate, ContactParams};
use crate::dynamics::{ControlInput, State, VehicleParams};
use crate::heave::HeaveModel;
use crate::mpc::{MpcConfig, MpcController, SolverStatus};
use crate::{Error, Result};

/// Everything one closed-loop run needs.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub vehicle: VehicleParams,
    pub heave: HeaveModel,
    /// Plant-side contact parameters (true restitution lives here).
    pub contact: ContactParams,
    /// Controller configuration (prediction-side restitution lives in its
    /// strategy).
    pub mpc: MpcConfig,
    pub initial_state: State,
    /// Simulated duration (s).
    pub t_end: f64,
    /// Plant integration step (s).
    pub plant_dt: f64,
    /// Replanning period (s); must be an integer multiple of `plant_dt`.
    pub control_period: f64,
    pub metrics: MetricsParams,
}

/// Thresholds the landing metrics are evaluated against.
#[derive(Debug, Clone, Copy)]
pub struct MetricsParams {
    /// A landing must hold for this long to count as settled (s).
    pub settle_window: f64,
    /// Largest post-impact deflection a successful landing may show (m).
    pub deflection_threshold: f64,
    /// "On the deck" means gap <= this factor times the contact `g_tol`.
    pub landed_gap_factor: f64,
}

impl Default for MetricsParams {
    fn default() -> Self {
        Self {
            settle_window: 0.5,
            deflection_threshold: 1.0e-3,
            landed_gap_factor: 10.0,
        }
    }
}

impl MetricsParams {
    pub fn validate(&self) -> Result<()> {
        if !self.settle_window.is_finite() || self.settle_window <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "metrics.settle_window: must be > 0 (got {})",
                self.settle_window
            )));
        }
        if !self.deflection_threshold.is_finite() || self.deflection_threshold <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "metrics.deflection_threshold: must be > 0 (got {})",
                self.deflection_threshold
            )));
        }
        if !self.landed_gap_factor.is_finite() || self.landed_gap_factor <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "metrics.landed_gap_factor: must be > 0 (got {})",
                self.landed_gap_factor
            )));
        }
        Ok(())
    }
}

impl Default for Scenario {
    /// The heaving-deck study setup: release at rest 0.5 m above the mean
    /// deck, 5 s horizon, 1 kHz plant, 20 Hz replanning.
    fn default() -> Self {
        Self {
            vehicle: VehicleParams::default(),
            heave: HeaveModel::default(),
            contact: ContactParams::default(),
            mpc: MpcConfig::default(),
            initial_state: State::at_rest(0.0, 0.5, 0.0),
            t_end: 5.0,
            plant_dt: 1.0e-3,
            control_period: 0.05,
            metrics: MetricsParams::default(),
        }
    }
}

impl Scenario {
    /// Default study scenario specialized to one strategy with the
    /// [`MpcConfig::landing_study`] tuning.
    pub fn landing_study(strategy: crate::mpc::StrategyVariant) -> Self {
        Self {
            mpc: MpcConfig::landing_study(strategy),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.vehicle.validate()?;
        self.heave.validate()?;
        self.contact.validate()?;
        self.mpc.validate()?;
        self.metrics.validate()?;
        if !self.initial_state.is_finite() {
            return Err(Error::InvalidParameter(
                "scenario.initial_state: must be finite".into(),
            ));
        }
        if !self.t_end.is_finite() || self.t_end <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "scenario.t_end: must be > 0 (got {})",
                self.t_end
            )));
        }
        if !self.plant_dt.is_finite() || self.plant_dt <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "scenario.plant_dt: must be > 0 (got {})",
                self.plant_dt
            )));
        }
        self.steps_per_control()?;
        self.n_steps()?;
        Ok(())
    }

    /// Plant steps per replanning period; errors unless the period is an
    /// integer multiple of the plant step.
    pub fn steps_per_control(&self) -> Result<usize> {
        integer_ratio(self.control_period, self.plant_dt, "scenario.control_period")
    }

    /// Total plant steps; errors unless `t_end` is an integer multiple of the
    /// plant step.
    pub fn n_steps(&self) -> Result<usize> {
        integer_ratio(self.t_end, self.plant_dt, "scenario.t_end")
    }
}

fn integer_ratio(value: f64, dt: f64, what: &str) -> Result<usize> {
    if !value.is_finite() || value <= 0.0 || !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{what}: must be > 0 (got {value})"
        )));
    }
    let ratio = value / dt;
    let n = ratio.round();
    if (ratio - n).abs() > 1e-6 * n.max(1.0) || n < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "{what} ({value}) must be an integer multiple of the plant step ({dt})"
        )));
    }
    Ok(n as usize)
}

/// One sample of the closed-loop trajectory (see the module docs for the
/// row conventions).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogRow {
    pub t: f64,
    pub x: f64,
    pub z: f64,
    pub theta: f64,
    pub xdot: f64,
    pub zdot: f64,
    pub thetadot: f64,
    /// Commanded thrust in force from this instant (N).
    pub thrust: f64,
    /// Commanded torque in force from this instant (N m).
    pub torque: f64,
    /// Deck elevation at `t` (m).
    pub z_plat: f64,
    /// Deck heave rate at `t` (m/s).
    pub zdot_plat: f64,
    /// Normal gap at `t` (m).
    pub gap: f64,
    /// Normal gap rate at `t` (m/s).
    pub gap_rate: f64,
    /// Normal impulse of the step that produced this state (N s).
    pub impulse: f64,
    /// Restitution residual of that step (virtual when no contact).
    pub residual: f64,
    /// Status flag of the most recent solve (0 converged, 1 iteration cap,
    /// 2 fallback).
    pub solver_flag: u8,
}

/// One replanning solve, recorded for the solver-contract checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveRecord {
    pub t: f64,
    pub tracking_cost: f64,
    pub restitution_cost: f64,
    pub total_cost: f64,
    /// Exact cost of the warm start this solve began from.
    pub warm_cost: f64,
    pub solver_flag: u8,
    pub iterations: usize,
}

/// Landing quality summary of one run. Fields that need a touchdown are
/// `None` (JSON `null`) when the run never made contact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    /// Mean |gap| between vehicle and deck over the whole run (m).
    pub mae_z: f64,
    /// Largest gap reopened after the first impact (m), if any impact.
    pub post_impact_deflection: Option<f64>,
    /// Earliest time after which the vehicle stayed on the deck for a full
    /// settle window (s).
    pub time_to_land: Option<f64>,
    /// Touched down and bounced no higher than the deflection threshold.
    pub success: bool,
    /// Gap rate one plant step before the first impact (m/s, negative =
    /// closing).
    pub pre_impact_relative_velocity: Option<f64>,
    /// Sum of all normal impulses (N s).
    pub impulse_total: f64,
    /// Time of the first positive impulse (s).
    pub first_impact_time: Option<f64>,
}

/// Full result of one closed-loop run.
#[derive(Debug, Clone)]
pub struct SimResult {
    pub rows: Vec<LogRow>,
    pub solves: Vec<SolveRecord>,
    pub metrics: Metrics,
}

/// Runs the closed loop to completion. Dynamic failures (divergence, a solve
/// on a non-finite state) abort with [`Error::NonFiniteState`]; configuration
/// problems are rejected up front.
pub fn simulate(scenario: &Scenario) -> Result<SimResult> {
    scenario.validate()?;
    let n_steps = scenario.n_steps()?;
    let steps_per_control = scenario.steps_per_control()?;
    let dt = scenario.plant_dt;

    let mut controller = MpcController::new(
        scenario.mpc.clone(),
        scenario.heave,
        scenario.vehicle,
    )?;

    let mut rows: Vec<LogRow> = Vec::with_capacity(n_steps + 1);
    let mut solves: Vec<SolveRecord> = Vec::new();
    let mut state = scenario.initial_state;
    let mut input = ControlInput::hover(&scenario.vehicle);
    let mut flag = SolverStatus::Converged.flag();
    let mut pending_impulse = 0.0;
    let mut pending_residual = 0.0;

    for k in 0..=n_steps {
        let t = k as f64 * dt;

        if k < n_steps && k % steps_per_control == 0 {
            let solution = controller.step(&state, t).map_err(|e| Error::NonFiniteState {
                t,
                detail: format!("replanning solve failed: {e}"),
            })?;
            input = solution.controls[0];
            flag = solution.status.flag();
            solves.push(SolveRecord {
                t,
                tracking_cost: solution.cost.tracking,
                restitution_cost: solution.cost.restitution,
                total_cost: solution.cost.total,
                warm_cost: solution.warm_cost,
                solver_flag: flag,
                iterations: solution.iterations,
            });
        }

        let deck = scenario.heave.deck_state(t);
        rows.push(LogRow {
            t,
            x: state.x(),
            z: state.z(),
            theta: state.theta(),
            xdot: state.xdot(),
            zdot: state.zdot(),
            thetadot: state.thetadot(),
            thrust: input.thrust,
            torque: input.torque,
            z_plat: deck.position,
            zdot_plat: deck.velocity,
            gap: gap(&state, deck.position),
            gap_rate: gap_rate(&state, deck.velocity),
            impulse: pending_impulse,
            residual: pending_residual,
            solver_flag: flag,
        });

        if k < n_steps {
            let (next, outcome) = contact_step(
                &state,
                input,
                &scenario.heave,
                &scenario.contact,
                &scenario.vehicle,
                t,
                dt,
            )
            .map_err(|e| Error::NonFiniteState {
                t,
                detail: format!("plant step failed: {e}"),
            })?;
            if !next.is_finite() {
                return Err(Error::NonFiniteState {
                    t: t + dt,
                    detail: "plant state diverged".into(),
                });
            }
            pending_impulse = outcome.impulse;
            pending_residual = outcome.residual;
            state = next;
        }
    }

    let metrics = compute_metrics(&rows, &scenario.metrics, &scenario.contact, dt);
    Ok(SimResult {
        rows,
        solves,
        metrics,
    })
}

/// First row whose producing step carried a positive impulse.
pub fn first_impact_index(rows: &[LogRow]) -> Option<usize> {
    rows.iter().position(|r| r.impulse > 0.0)
}

/// Evaluates the landing metrics on a finished trajectory.
pub fn compute_metrics(
    rows: &[LogRow],
    params: &MetricsParams,
    contact: &ContactParams,
    plant_dt: f64,
) -> Metrics {
    let n = rows.len();
    let mae_z = if n == 0 {
        0.0
    } else {
        rows.iter().map(|r| r.gap.abs()).sum::<f64>() / n as f64
    };
    let impulse_total: f64 = rows.iter().map(|r| r.impulse).sum();

    let first = first_impact_index(rows);
    let first_impact_time = first.map(|i| rows[i].t);
    // Row i-1's gap rate is exactly the pre-step relative velocity the
    // impact law saw (i >= 1 always: row 0 carries no impulse).
    let pre_impact_relative_velocity = first.map(|i| rows[i - 1].gap_rate);

    let post_impact_deflection = first.map(|i| {
        rows[i..]
            .iter()
            .map(|r| r.gap.max(0.0))
            .fold(0.0, f64::max)
    });

    let time_to_land = first.and_then(|_| {
        let landed_gap = params.landed_gap_factor * contact.g_tol;
        let window_rows = (params.settle_window / plant_dt).round() as usize;
        if window_rows + 1 > n {
            return None;
        }
        // next_off[k] = first index >= k whose gap exceeds the landed
        // threshold (n when none); a window starting at k settles iff the
        // next off-deck row lies beyond it.
        let mut next_off = vec![n; n + 1];
        for k in (0..n).rev() {
            next_off[k] = if rows[k].gap > landed_gap {
                k
            } else {
                next_off[k + 1]
            };
        }
        (0..n - window_rows)
            .find(|&k| next_off[k] > k + window_rows)
            .map(|k| rows[k].t)
    });

    let success = matches!(
        (first, post_impact_deflection),
        (Some(_), Some(defl)) if defl <= params.deflection_threshold
    );

    Metrics {
        mae_z,
        post_impact_deflection,
        time_to_land,
        success,
        pre_impact_relative_velocity,
        impulse_total,
        first_impact_time,
    }
}

impl Metrics {
    /// Sanity flag used by reports: all populated fields finite.
    pub fn is_finite(&self) -> bool {
        let opt = |v: Option<f64>| v.is_none_or(f64::is_finite);
        self.mae_z.is_finite()
            && self.impulse_total.is_finite()
            && opt(self.post_impact_deflection)
            && opt(self.time_to_land)
            && opt(self.pre_impact_relative_velocity)
            && opt(self.first_impact_time)
    }
}
