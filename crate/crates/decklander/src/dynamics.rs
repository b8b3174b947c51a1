//! Planar multirotor rigid-body model and symplectic integration.
//!
//! The vehicle is a planar rigid body with configuration q = [x, z, theta]
//! (horizontal position, altitude, pitch) and diagonal mass matrix
//! M = diag(m, m, I). Thrust T acts along the body z-axis and the pitch
//! torque tau acts directly on theta, so the generalized force is
//! B(theta) * [T, tau] with B = [[-sin theta, 0], [cos theta, 0], [0, 1]].
//!
//! Time stepping is semi-implicit (symplectic) Euler: velocities are updated
//! from forces first, then positions advance with the *new* velocities. The
//! ordering matters: from rest, n free-fall steps lower the altitude by
//! g * dt^2 * n(n+1)/2, not the explicit-Euler n(n-1)/2, and the energy error
//! stays bounded instead of accumulating. The same first-order step is what
//! the contact resolver and the MPC prediction model build on, so plant and
//! prediction stay bit-compatible at equal step sizes.

use nalgebra::{Matrix3x2, Vector2, Vector3, Vector6};

use crate::{Error, Result};

/// Physical vehicle parameters. Defaults are a palm-size quadrotor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleParams {
    /// Mass m (kg).
    pub mass: f64,
    /// Pitch moment of inertia I (kg m^2).
    pub inertia: f64,
    /// Gravitational acceleration g (m/s^2), positive down.
    pub gravity: f64,
    /// Admissible total thrust range [T_min, T_max] (N).
    pub thrust_bounds: (f64, f64),
    /// Admissible pitch torque range [tau_min, tau_max] (N m).
    pub torque_bounds: (f64, f64),
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self {
            mass: 0.03,
            inertia: 1.4e-5,
            gravity: 9.81,
            thrust_bounds: (0.0, 0.6),
            torque_bounds: (-0.01, 0.01),
        }
    }
}

impl VehicleParams {
    /// Checks positivity of the physical constants and ordering of the bounds.
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.mass,
            self.inertia,
            self.gravity,
            self.thrust_bounds.0,
            self.thrust_bounds.1,
            self.torque_bounds.0,
            self.torque_bounds.1,
        ];
        if !all.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(
                "vehicle: all parameters must be finite".into(),
            ));
        }
        if self.mass <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "vehicle.mass: must be > 0 (got {})",
                self.mass
            )));
        }
        if self.inertia <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "vehicle.inertia: must be > 0 (got {})",
                self.inertia
            )));
        }
        if self.gravity <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "vehicle.gravity: must be > 0 (got {})",
                self.gravity
            )));
        }
        if self.thrust_bounds.0 > self.thrust_bounds.1 {
            return Err(Error::InvalidParameter(format!(
                "vehicle.thrust_bounds: lower bound {} exceeds upper bound {}",
                self.thrust_bounds.0, self.thrust_bounds.1
            )));
        }
        if self.torque_bounds.0 > self.torque_bounds.1 {
            return Err(Error::InvalidParameter(format!(
                "vehicle.torque_bounds: lower bound {} exceeds upper bound {}",
                self.torque_bounds.0, self.torque_bounds.1
            )));
        }
        Ok(())
    }

    /// Thrust that exactly cancels gravity, m * g (N). Not clipped to bounds.
    pub fn hover_thrust(&self) -> f64 {
        self.mass * self.gravity
    }
}

/// Full vehicle state: generalized positions and velocities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    /// [x, z, theta] (m, m, rad).
    pub q: Vector3<f64>,
    /// [xdot, zdot, thetadot] (m/s, m/s, rad/s).
    pub qdot: Vector3<f64>,
}

impl State {
    pub fn new(q: Vector3<f64>, qdot: Vector3<f64>) -> Self {
        Self { q, qdot }
    }

    /// State at rest at the given position.
    pub fn at_rest(x: f64, z: f64, theta: f64) -> Self {
        Self::new(Vector3::new(x, z, theta), Vector3::zeros())
    }

    pub fn x(&self) -> f64 {
        self.q[0]
    }
    pub fn z(&self) -> f64 {
        self.q[1]
    }
    pub fn theta(&self) -> f64 {
        self.q[2]
    }
    pub fn xdot(&self) -> f64 {
        self.qdot[0]
    }
    pub fn zdot(&self) -> f64 {
        self.qdot[1]
    }
    pub fn thetadot(&self) -> f64 {
        self.qdot[2]
    }

    pub fn is_finite(&self) -> bool {
        self.q.iter().chain(self.qdot.iter()).all(|v| v.is_finite())
    }

    /// Stacked [q; qdot] vector, the layout the MPC weights act on.
    pub fn as_vector6(&self) -> Vector6<f64> {
        Vector6::new(
            self.q[0], self.q[1], self.q[2], self.qdot[0], self.qdot[1], self.qdot[2],
        )
    }
}

/// Thrust/torque command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlInput {
    /// Total thrust T (N), along the body z-axis.
    pub thrust: f64,
    /// Pitch torque tau (N m).
    pub torque: f64,
}

impl ControlInput {
    pub fn new(thrust: f64, torque: f64) -> Self {
        Self { thrust, torque }
    }

    /// Hover command: thrust m * g clipped to the admissible range, no torque.
    pub fn hover(p: &VehicleParams) -> Self {
        Self::new(
            p.hover_thrust()
                .clamp(p.thrust_bounds.0, p.thrust_bounds.1),
            0.0,
        )
    }

    /// Projection onto the box of admissible inputs.
    pub fn clamped(&self, p: &VehicleParams) -> Self {
        Self::new(
            self.thrust.clamp(p.thrust_bounds.0, p.thrust_bounds.1),
            self.torque.clamp(p.torque_bounds.0, p.torque_bounds.1),
        )
    }

    pub fn is_finite(&self) -> bool {
        self.thrust.is_finite() && self.torque.is_finite()
    }

    pub fn as_vector2(&self) -> Vector2<f64> {
        Vector2::new(self.thrust, self.torque)
    }
}

/// Input map B(theta): columns are the generalized directions of thrust and
/// pitch torque. Thrust tilts with the body, torque is direct.
pub fn input_map(theta: f64) -> Matrix3x2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix3x2::new(-s, 0.0, c, 0.0, 0.0, 1.0)
}

/// Semi-implicit velocity half-step: returns the post-force velocities
///
///   qdot' = qdot + M^{-1} (B(theta) u - m g e_z) dt.
///
/// The vertical force is formed as T cos(theta) - m g before dividing by m so
/// that T = m * g at level attitude is a bit-exact equilibrium.
pub fn free_velocity_update(
    s: &State,
    u: ControlInput,
    p: &VehicleParams,
    dt: f64,
) -> Result<Vector3<f64>> {
    if !s.is_finite() || !u.is_finite() || !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "free_velocity_update: non-finite input or non-positive dt (dt = {dt})"
        )));
    }
    let (sin_t, cos_t) = s.theta().sin_cos();
    let fx = -u.thrust * sin_t;
    let fz = u.thrust * cos_t - p.mass * p.gravity;
    Ok(Vector3::new(
        s.qdot[0] + fx / p.mass * dt,
        s.qdot[1] + fz / p.mass * dt,
        s.qdot[2] + u.torque / p.inertia * dt,
    ))
}

/// Semi-implicit position half-step: q' = q + dt * qdot_next, where qdot_next
/// is the velocity *after* the force update.
pub fn integrate_position(q: &Vector3<f64>, qdot_next: &Vector3<f64>, dt: f64) -> Vector3<f64> {
    q + qdot_next * dt
}

/// One full contact-free semi-implicit Euler step.
pub fn free_step(s: &State, u: ControlInput, p: &VehicleParams, dt: f64) -> Result<State> {
    let qdot = free_velocity_update(s, u, p, dt)?;
    let q = integrate_position(&s.q, &qdot, dt);
    Ok(State::new(q, qdot))
}

/// Total mechanical energy: kinetic plus m g z (J). Useful for drift checks.
pub fn mechanical_energy(s: &State, p: &VehicleParams) -> f64 {
    let kinetic = 0.5 * p.mass * (s.xdot() * s.xdot() + s.zdot() * s.zdot())
        + 0.5 * p.inertia * s.thetadot() * s.thetadot();
    kinetic + p.mass * p.gravity * s.z()
}
