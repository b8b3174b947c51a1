//! Velocity-level contact with Newton's restitution, posed as a scalar LCP.
//!
//! Contact acts along the single normal direction of the deck, with normal
//! Jacobian J_N = [0, 1, 0]: the gap is g_N = z - z_plat(t) and its rate is
//! gdot_N = zdot - zdot_plat(t). Resolving an impact means finding a normal
//! impulse lambda_N >= 0 such that the restitution residual
//!
//!   nu_N = R lambda_N + u,    R = J_N M^{-1} J_N^T,
//!   u    = (1 + eps) * (gdot_N before the step)
//!
//! satisfies the complementarity conditions 0 <= lambda_N  perp  nu_N >= 0.
//! nu_N is the post-impact relative velocity error against Newton's law
//! gdot+ = -eps * gdot-: it uses the pre-step relative velocity in the affine
//! term, the deck velocity sampled once at the step start (the deck moves
//! slowly relative to one step), and lambda_N enters through the inverse
//! inertia R. Because the problem is scalar with R > 0, the solution is the
//! closed form lambda_N = max(0, -u / R); [`solve_lcp_oracle`] reaches the
//! same answer by enumerating the two complementarity branches and checking
//! feasibility explicitly, and the two routes are kept separate so each can
//! audit the other.
//!
//! [`contact_step`] embeds the impulse in the semi-implicit integrator:
//! forces first, then the impulse if contact activates, then positions. Two
//! regularizations keep time stepping well behaved: impacts slower than
//! `v_rest` resolve with restitution zero (otherwise an elastic deck produces
//! an endless chain of ever-smaller bounces), and any penetration beyond
//! `g_tol` left after the position update is clamped back to the deck
//! surface.

use nalgebra::Vector3;

use crate::dynamics::{free_velocity_update, integrate_position, ControlInput, State, VehicleParams};
use crate::heave::HeaveModel;
use crate::{Error, Result};

/// Contact normal Jacobian: the gap depends on the configuration only through
/// z, so grad_q g_N = [0, 1, 0].
pub const NORMAL_JACOBIAN: [f64; 3] = [0.0, 1.0, 0.0];

/// Impact-model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactParams {
    /// Restitution coefficient eps_N in [0, 1].
    pub restitution: f64,
    /// Rest threshold (m/s): impacts with |gdot-| below it resolve with
    /// restitution zero so grazing contact settles instead of chattering.
    pub v_rest: f64,
    /// Activation/penetration tolerance (m).
    pub g_tol: f64,
}

impl Default for ContactParams {
    fn default() -> Self {
        Self {
            restitution: 0.5,
            v_rest: 0.02,
            g_tol: 1e-6,
        }
    }
}

impl ContactParams {
    pub fn with_restitution(restitution: f64) -> Self {
        Self {
            restitution,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.restitution.is_finite() || !(0.0..=1.0).contains(&self.restitution) {
            return Err(Error::InvalidParameter(format!(
                "contact.restitution: restitution out of [0, 1] (got {})",
                self.restitution
            )));
        }
        if !self.v_rest.is_finite() || self.v_rest < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "contact.v_rest: must be >= 0 (got {})",
                self.v_rest
            )));
        }
        if !self.g_tol.is_finite() || self.g_tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "contact.g_tol: must be > 0 (got {})",
                self.g_tol
            )));
        }
        Ok(())
    }
}

/// What one [`contact_step`] did.
///
/// `residual` is the solved LCP residual R lambda + u when the step was
/// active, and the "virtual" residual (1 + eps) * gdot- (with lambda = 0)
/// when it was not; the virtual value is negative during an approach, which
/// is exactly the signal the MPC's restitution cost penalizes. Both gap
/// rates are taken against the step-start deck-velocity sample, matching the
/// impulse assembly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactOutcome {
    /// True when the impulse path ran this step.
    pub active: bool,
    /// Normal impulse lambda_N (N s), zero when inactive.
    pub impulse: f64,
    /// Restitution residual nu_N (m/s); see the type docs for the convention.
    pub residual: f64,
    /// Relative normal velocity before the step (m/s).
    pub gap_rate_pre: f64,
    /// Relative normal velocity after the velocity update (m/s).
    pub gap_rate_post: f64,
}

/// Normal gap g_N = z - z_plat (m).
pub fn gap(s: &State, deck_position: f64) -> f64 {
    s.z() - deck_position
}

/// Normal gap rate gdot_N = zdot - zdot_plat (m/s).
pub fn gap_rate(s: &State, deck_velocity: f64) -> f64 {
    s.zdot() - deck_velocity
}

/// Assembles the scalar LCP data (R, u) for one potential impact.
///
/// R = J_N M^{-1} J_N^T collapses to 1 / m for this normal; u is the
/// restitution-scaled pre-step relative velocity (1 + eps)(zdot_prev -
/// zdot_plat). `qdot_free` is accepted alongside `qdot_prev` because the
/// caller has both and the affine term deliberately uses the *pre-step*
/// velocity: the impulse dominates the finite forces acting within the step.
pub fn assemble_lcp(
    qdot_free: &Vector3<f64>,
    qdot_prev: &Vector3<f64>,
    deck_velocity: f64,
    cp: &ContactParams,
    p: &VehicleParams,
) -> Result<(f64, f64)> {
    if !qdot_free.iter().all(|v| v.is_finite())
        || !qdot_prev.iter().all(|v| v.is_finite())
        || !deck_velocity.is_finite()
    {
        return Err(Error::InvalidParameter(
            "assemble_lcp: non-finite velocity input".into(),
        ));
    }
    let j = NORMAL_JACOBIAN;
    let r = j[0] * j[0] / p.mass + j[1] * j[1] / p.mass + j[2] * j[2] / p.inertia;
    let rel_pre = j[0] * qdot_prev[0] + j[1] * qdot_prev[1] + j[2] * qdot_prev[2] - deck_velocity;
    let u = (1.0 + cp.restitution) * rel_pre;
    Ok((r, u))
}

/// Closed-form solution of the scalar LCP 0 <= lambda perp R lambda + u >= 0:
/// lambda = max(0, -u / R).
pub fn solve_lcp_scalar(r: f64, u: f64) -> Result<f64> {
    if !r.is_finite() || !u.is_finite() || r <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "solve_lcp_scalar: need finite u and R > 0 (R = {r}, u = {u})"
        )));
    }
    let x = -u / r;
    Ok(if x > 0.0 { x } else { 0.0 })
}

/// Independent LCP solution by branch enumeration.
///
/// A scalar LCP has exactly two complementarity branches: lambda = 0 (the
/// bodies separate, residual u must be nonnegative) or residual = 0 (the
/// impulse fires, lambda = -u / R must be nonnegative). This routine tries
/// both, keeps the feasible one, and never consults the max(0, .) closed
/// form, so agreement between the two routes is a real check.
pub fn solve_lcp_oracle(r: f64, u: f64) -> Result<f64> {
    if !r.is_finite() || !u.is_finite() || r <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "solve_lcp_oracle: need finite u and R > 0 (R = {r}, u = {u})"
        )));
    }
    // Feasibility to within rounding: r * (-u / r) reconstructs -u only to
    // one ulp, so the impulse branch gets a relative slack on its residual.
    let slack = 1e-12 * u.abs().max(1.0);
    let candidates = [0.0, -u / r];
    for lambda in candidates {
        let w = r * lambda + u;
        if lambda >= 0.0 && w >= -slack {
            return Ok(lambda);
        }
    }
    unreachable!("scalar LCP with R > 0 always has a feasible branch");
}

/// Smoothed impulse for gradient-based solvers: max(0, y) is replaced by
/// (y + sqrt(y^2 + beta^2)) / 2 in the relative-velocity variable y = -u.
/// beta = 0 recovers [`solve_lcp_scalar`] bit-for-bit.
pub(crate) fn solve_lcp_smoothed(r: f64, u: f64, beta: f64) -> f64 {
    let y = -u;
    let smooth = (y + (y * y + beta * beta).sqrt()) * 0.5;
    smooth / r
}

/// Restitution residual nu_N = R lambda + u (m/s).
pub fn restitution_residual(r: f64, u: f64, lambda: f64) -> f64 {
    r * lambda + u
}

/// Branch bookkeeping from one step, enough to differentiate through it with
/// the taken branch held fixed. Solver-internal.
#[derive(Debug, Clone, Copy)]
pub(crate) struct StepDetail {
    pub active: bool,
    /// Restitution actually applied by the impulse (0 below `v_rest`).
    pub eps_eff: f64,
    /// Pre-step relative velocity gdot- (m/s).
    pub rate_pre: f64,
    /// Velocity kick R lambda = lambda / m added to zdot (m/s).
    pub kick: f64,
    /// d(kick)/dy at y = -(1 + eps_eff) gdot-; 1 for the exact active kernel.
    pub sigma_prime: f64,
    pub clamped_z: bool,
    pub clamped_vz: bool,
}

impl StepDetail {
    fn inactive(rate_pre: f64) -> Self {
        Self {
            active: false,
            eps_eff: 0.0,
            rate_pre,
            kick: 0.0,
            sigma_prime: 0.0,
            clamped_z: false,
            clamped_vz: false,
        }
    }
}

/// One plant step with contact resolution (exact max kernel).
///
/// Sequence: force update of the velocities; impulse if contact activates
/// (predicted next gap at the free velocity within `g_tol` while the current
/// relative velocity closes); position update with the post-impulse
/// velocities; penetration clamp. Returns the next state and what the
/// contact did.
pub fn contact_step(
    s: &State,
    u: ControlInput,
    deck: &HeaveModel,
    cp: &ContactParams,
    p: &VehicleParams,
    t: f64,
    dt: f64,
) -> Result<(State, ContactOutcome)> {
    let (next, outcome, _) = step_with_kernel(s, u, deck, cp, p, t, dt, 0.0)?;
    Ok((next, outcome))
}

/// Contact step parameterized by the LCP smoothing width; `beta = 0` is the
/// exact kernel used by the plant, `beta > 0` is for solver rollouts only.
#[allow(clippy::too_many_arguments)]
pub(crate) fn step_with_kernel(
    s: &State,
    u: ControlInput,
    deck: &HeaveModel,
    cp: &ContactParams,
    p: &VehicleParams,
    t: f64,
    dt: f64,
    beta: f64,
) -> Result<(State, ContactOutcome, StepDetail)> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "contact_step: non-finite time {t}"
        )));
    }
    let deck_now = deck.deck_state(t);
    let qdot_free = free_velocity_update(s, u, p, dt)?;

    let gap_now = gap(s, deck_now.position);
    let rate_pre = gap_rate(s, deck_now.velocity);
    let rate_free = qdot_free[1] - deck_now.velocity;
    let active = gap_now + dt * rate_free <= cp.g_tol && rate_pre < 0.0;

    let (qdot_next, impulse, residual, mut detail) = if active {
        let eps_eff = if rate_pre.abs() < cp.v_rest {
            0.0
        } else {
            cp.restitution
        };
        let cp_eff = ContactParams {
            restitution: eps_eff,
            ..*cp
        };
        let (r, u_aff) = assemble_lcp(&qdot_free, &s.qdot, deck_now.velocity, &cp_eff, p)?;
        let (lambda, sigma_prime) = if beta > 0.0 {
            let y = -u_aff;
            (
                solve_lcp_smoothed(r, u_aff, beta),
                0.5 * (1.0 + y / (y * y + beta * beta).sqrt()),
            )
        } else {
            // Active implies rate_pre < 0, hence y > 0 and d max(0, y)/dy = 1.
            (solve_lcp_scalar(r, u_aff)?, 1.0)
        };
        // qdot += M^{-1} J_N^T lambda.
        let j = NORMAL_JACOBIAN;
        let kick = j[1] * lambda / p.mass;
        let qdot = Vector3::new(
            qdot_free[0] + j[0] * lambda / p.mass,
            qdot_free[1] + kick,
            qdot_free[2] + j[2] * lambda / p.inertia,
        );
        let detail = StepDetail {
            active: true,
            eps_eff,
            rate_pre,
            kick,
            sigma_prime,
            clamped_z: false,
            clamped_vz: false,
        };
        (qdot, lambda, restitution_residual(r, u_aff, lambda), detail)
    } else {
        (
            qdot_free,
            0.0,
            (1.0 + cp.restitution) * rate_pre,
            StepDetail::inactive(rate_pre),
        )
    };

    let mut q_next = integrate_position(&s.q, &qdot_next, dt);
    let mut qdot_final = qdot_next;
    let deck_next = deck.deck_state(t + dt);
    if q_next[1] - deck_next.position < -cp.g_tol {
        q_next[1] = deck_next.position;
        detail.clamped_z = true;
        if qdot_final[1] - deck_next.velocity < 0.0 {
            qdot_final[1] = deck_next.velocity;
            detail.clamped_vz = true;
        }
    }

    let outcome = ContactOutcome {
        active,
        impulse,
        residual,
        gap_rate_pre: rate_pre,
        gap_rate_post: qdot_final[1] - deck_now.velocity,
    };
    Ok((State::new(q_next, qdot_final), outcome, detail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn params() -> VehicleParams {
        VehicleParams::default()
    }

    #[test]
    fn gap_and_rate_examples() {
        let s = State::new(Vector3::new(0.0, 0.5, 0.0), Vector3::new(0.0, -1.0, 0.0));
        assert_relative_eq!(gap(&s, 0.09239), 0.40761, epsilon = 1e-12);
        assert_relative_eq!(gap_rate(&s, 0.3), -1.3, epsilon = 1e-12);
        assert_eq!(gap(&s, 0.5), 0.0);
    }

    #[test]
    fn assemble_matches_hand_values() {
        // m = 0.03 kg: R = 1/m = 33.333...; eps = 0.5 and gdot- = -1 m/s:
        // u = 1.5 * (-1) = -1.5.
        let p = params();
        let cp = ContactParams::with_restitution(0.5);
        let prev = Vector3::new(0.0, -1.0, 0.0);
        let free = Vector3::new(0.0, -1.4905, 0.0);
        let (r, u) = assemble_lcp(&free, &prev, 0.0, &cp, &p).unwrap();
        assert_relative_eq!(r, 1.0 / 0.03, epsilon = 1e-12);
        assert_relative_eq!(u, -1.5, epsilon = 1e-12);
        // The affine term uses the pre-step velocity, not the free one.
        let (_, u2) = assemble_lcp(&prev, &prev, 0.0, &cp, &p).unwrap();
        assert_eq!(u, u2);
    }

    #[test]
    fn assemble_rejects_non_finite() {
        let p = params();
        let cp = ContactParams::default();
        let bad = Vector3::new(0.0, f64::NAN, 0.0);
        let ok = Vector3::zeros();
        assert!(assemble_lcp(&bad, &ok, 0.0, &cp, &p).is_err());
        assert!(assemble_lcp(&ok, &ok, f64::INFINITY, &cp, &p).is_err());
    }

    #[test]
    fn closed_form_solution_values() {
        let r = 1.0 / 0.03;
        // Closing: lambda = 1.5 / R = m (1 + eps) |gdot-| = 0.045 N s.
        assert_relative_eq!(solve_lcp_scalar(r, -1.5).unwrap(), 0.045, epsilon = 1e-12);
        // Separating or grazing: no impulse.
        assert_eq!(solve_lcp_scalar(r, 0.7).unwrap(), 0.0);
        assert_eq!(solve_lcp_scalar(r, 0.0).unwrap(), 0.0);
        assert!(solve_lcp_scalar(0.0, -1.0).is_err());
        assert!(solve_lcp_scalar(r, f64::NAN).is_err());
    }

    #[test]
    fn oracle_branch_values() {
        let r = 1.0 / 0.03;
        assert_relative_eq!(solve_lcp_oracle(r, -1.5).unwrap(), 0.045, epsilon = 1e-12);
        assert_eq!(solve_lcp_oracle(r, 0.7).unwrap(), 0.0);
        assert_eq!(solve_lcp_oracle(r, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn residual_examples() {
        let r = 1.0 / 0.03;
        assert_relative_eq!(restitution_residual(r, -1.5, 0.045), 0.0, epsilon = 1e-12);
        assert_relative_eq!(restitution_residual(r, 0.3, 0.0), 0.3, epsilon = 1e-15);
    }

    #[test]
    fn newton_law_through_the_impulse() {
        // eps = 0.5, gdot- = -1 on a static deck: the impulse alone reverses
        // the relative velocity to +0.5; nu is exactly zero.
        let r = 1.0 / 0.03;
        let u = -1.5;
        let lambda = solve_lcp_scalar(r, u).unwrap();
        let gdot_plus = -1.0 + r * lambda;
        assert_relative_eq!(gdot_plus, 0.5, epsilon = 1e-12);
        assert_relative_eq!(restitution_residual(r, u, lambda), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn smoothed_kernel_recovers_exact_at_zero_beta() {
        let r = 1.0 / 0.03;
        for u in [-2.0, -1.5, -1e-9, 0.0, 1e-9, 0.4] {
            assert_eq!(solve_lcp_smoothed(r, u, 0.0), solve_lcp_scalar(r, u).unwrap());
        }
        // Positive beta stays close and is smooth through u = 0.
        assert!((solve_lcp_smoothed(r, -1.5, 1e-4) - 0.045).abs() < 1e-6);
        assert!(solve_lcp_smoothed(r, 0.0, 1e-4) > 0.0);
    }

    #[test]
    fn surface_impact_matches_hand_derivation() {
        // Static deck, z at the surface, incoming zdot = -1, free flight
        // input: post-step zdot = 0.5 - g dt (the impulse sets +0.5, then
        // gravity acts within the same velocity update).
        let p = params();
        let deck = HeaveModel::static_deck(0.5);
        let cp = ContactParams::with_restitution(0.5);
        let s = State::new(Vector3::new(0.0, 0.0, 0.0), Vector3::new(0.0, -1.0, 0.0));
        let dt = 0.05;
        let (next, out) = contact_step(&s, ControlInput::new(0.0, 0.0), &deck, &cp, &p, 0.0, dt).unwrap();
        assert!(out.active);
        assert_relative_eq!(next.zdot(), 0.5 - 9.81 * dt, epsilon = 1e-12);
        assert_relative_eq!(out.impulse, 0.03 * 1.5, epsilon = 1e-12);
        assert_relative_eq!(out.residual, 0.0, epsilon = 1e-12);
        assert_eq!(out.gap_rate_pre, -1.0);
    }

    #[test]
    fn inelastic_impact_zeroes_the_jump() {
        // eps = 0 at hover thrust (no net force within the step): the impulse
        // removes the whole approach velocity exactly.
        let p = params();
        let deck = HeaveModel::static_deck(0.0);
        let cp = ContactParams::with_restitution(0.0);
        let s = State::new(Vector3::new(0.0, 0.0, 0.0), Vector3::new(0.0, -1.0, 0.0));
        let dt = 0.001;
        let u = ControlInput::new(p.hover_thrust(), 0.0);
        let (next, out) = contact_step(&s, u, &deck, &cp, &p, 0.0, dt).unwrap();
        assert!(out.active);
        assert_eq!(next.zdot(), 0.0);
        assert_relative_eq!(out.residual, 0.0, epsilon = 1e-12);
        // Under gravity alone the same step sags below the surface and the
        // clamp restores it: the vehicle ends the step riding the deck.
        let (rest, _) =
            contact_step(&s, ControlInput::new(0.0, 0.0), &deck, &cp, &p, 0.0, dt).unwrap();
        assert_eq!(rest.z(), 0.0);
        assert_eq!(rest.zdot(), 0.0);
    }

    #[test]
    fn far_contact_is_a_free_step() {
        let p = params();
        let deck = HeaveModel::default();
        let cp = ContactParams::default();
        let s = State::at_rest(0.0, 5.0, 0.1);
        let u = ControlInput::new(0.2, 1e-3);
        let (next, out) = contact_step(&s, u, &deck, &cp, &p, 0.3, 0.01).unwrap();
        let free = crate::dynamics::free_step(&s, u, &p, 0.01).unwrap();
        assert_eq!(next, free);
        assert!(!out.active);
        assert_eq!(out.impulse, 0.0);
        // Virtual residual: (1 + eps)(zdot - zdot_plat) with lambda = 0.
        assert_relative_eq!(
            out.residual,
            1.5 * (0.0 - deck.deck_velocity(0.3)),
            epsilon = 1e-12
        );
    }

    #[test]
    fn slow_impact_uses_zero_restitution() {
        // |gdot-| = 0.01 < v_rest = 0.02: effective restitution drops to 0.
        let p = params();
        let deck = HeaveModel::static_deck(0.9);
        let cp = ContactParams::with_restitution(0.9);
        let s = State::new(Vector3::new(0.0, 0.0, 0.0), Vector3::new(0.0, -0.01, 0.0));
        let (_, out) = contact_step(&s, ControlInput::new(p.hover_thrust(), 0.0), &deck, &cp, &p, 0.0, 0.001).unwrap();
        assert!(out.active);
        assert_relative_eq!(out.impulse, 0.03 * 0.01, epsilon = 1e-12);
        assert_relative_eq!(out.residual, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn penetration_clamp_restores_the_surface() {
        // A state already below the deck and still descending: after the
        // step z sits exactly on the deck and the downward excess is gone.
        let p = params();
        let deck = HeaveModel::default();
        let cp = ContactParams::default();
        let t = 0.4;
        let below = deck.deck_position(t) - 0.01;
        let s = State::new(Vector3::new(0.0, below, 0.0), Vector3::new(0.0, -0.5, 0.0));
        let (next, _) = contact_step(&s, ControlInput::new(0.0, 0.0), &deck, &cp, &p, t, 0.001).unwrap();
        let deck_next = deck.deck_state(t + 0.001);
        assert_eq!(next.z(), deck_next.position);
        assert!(next.zdot() - deck_next.velocity >= 0.0);
    }

    #[test]
    fn energy_ratio_is_restitution_squared() {
        // The impact law itself scales normal kinetic energy by eps_eff^2.
        // Run the real kernel with a vanishing gravity so the same-step force
        // increment cannot pollute a 1e-9 ratio check.
        let p = VehicleParams {
            gravity: 1e-12,
            ..params()
        };
        for eps in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let deck = HeaveModel::static_deck(eps);
            let cp = ContactParams::with_restitution(eps);
            let v0 = -1.3;
            let s = State::new(Vector3::new(0.0, 0.0, 0.0), Vector3::new(0.0, v0, 0.0));
            let (next, out) =
                contact_step(&s, ControlInput::new(0.0, 0.0), &deck, &cp, &p, 0.0, 0.05).unwrap();
            assert!(out.active);
            let ratio = (next.zdot() * next.zdot()) / (v0 * v0);
            assert!(
                (ratio - eps * eps).abs() < 1e-9,
                "eps {eps}: ratio {ratio}"
            );
        }
    }

    #[test]
    fn lcp_triple_holds_on_active_steps() {
        // Randomized closing contacts: the solved triple satisfies
        // lambda >= 0, nu >= 0, lambda * nu = 0 to machine precision.
        let p = params();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let eps: f64 = rng.gen_range(0.0..=1.0);
            let v: f64 = rng.gen_range(-3.0..-1e-3);
            let deck = HeaveModel::static_deck(eps);
            let cp = ContactParams::with_restitution(eps);
            let s = State::new(Vector3::new(0.0, 0.0, 0.0), Vector3::new(0.0, v, 0.0));
            let (_, out) =
                contact_step(&s, ControlInput::new(0.0, 0.0), &deck, &cp, &p, 0.0, 0.01).unwrap();
            assert!(out.active);
            assert!(out.impulse >= 0.0);
            assert!(out.residual >= -1e-9);
            assert!(out.impulse * out.residual <= 1e-9);
            // Closed-form impulse magnitude for a closing static-deck contact.
            let eps_eff = if v.abs() < cp.v_rest { 0.0 } else { eps };
            assert_relative_eq!(
                out.impulse,
                p.mass * (1.0 + eps_eff) * v.abs(),
                max_relative = 1e-12
            );
        }
    }

    proptest! {
        // More negative u (faster approach) never yields a smaller impulse,
        // and the residual is monotone in the impulse at fixed u.
        #[test]
        fn impulse_monotone_in_approach(u1 in -5.0f64..5.0, u2 in -5.0f64..5.0) {
            let r = 1.0 / 0.03;
            let (lo, hi) = if u1 <= u2 { (u1, u2) } else { (u2, u1) };
            let l_lo = solve_lcp_scalar(r, lo).unwrap();
            let l_hi = solve_lcp_scalar(r, hi).unwrap();
            prop_assert!(l_lo >= l_hi);
        }

        #[test]
        fn residual_monotone_in_impulse(u in -5.0f64..5.0, l1 in 0.0f64..2.0, l2 in 0.0f64..2.0) {
            let r = 1.0 / 0.03;
            let (lo, hi) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
            prop_assert!(restitution_residual(r, u, lo) <= restitution_residual(r, u, hi));
        }

        // Scalar solver against the enumerative oracle on random data.
        #[test]
        fn scalar_agrees_with_oracle(r in 1e-3f64..1e3, u in -10.0f64..10.0) {
            let a = solve_lcp_scalar(r, u).unwrap();
            let b = solve_lcp_oracle(r, u).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}
