//! Heaving-deck kinematics.
//!
//! The landing platform moves vertically as a single sinusoid,
//! z_plat(t) = A sin(2 pi f t + phi), a deliberately simple stand-in for wave
//! motion whose position and velocity the controller is allowed to query
//! exactly. The deck also carries the plant-side restitution coefficient used
//! when the vehicle strikes it.

use crate::{Error, Result};

/// Sinusoidal deck motion plus the deck's impact restitution.
///
/// Defaults are the stress-test deck used throughout the examples: 0.1 m
/// amplitude at 1.5 Hz (peak heave rate 0.94 m/s, peak acceleration 8.9 m/s^2,
/// close to 1 g) with restitution 0.5, starting from phase 5 pi / 8.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeaveModel {
    /// Amplitude A (m), >= 0.
    pub amplitude: f64,
    /// Frequency f (Hz), >= 0.
    pub frequency: f64,
    /// Phase offset phi (rad).
    pub phase: f64,
    /// Deck restitution epsilon in [0, 1] applied by the plant at impact.
    pub restitution: f64,
}

impl Default for HeaveModel {
    fn default() -> Self {
        Self {
            amplitude: 0.1,
            frequency: 1.5,
            phase: 5.0 * std::f64::consts::PI / 8.0,
            restitution: 0.5,
        }
    }
}

/// Deck position and velocity at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeckState {
    /// z_plat (m).
    pub position: f64,
    /// zdot_plat (m/s).
    pub velocity: f64,
}

impl HeaveModel {
    /// Static deck at height zero with the given restitution.
    pub fn static_deck(restitution: f64) -> Self {
        Self {
            amplitude: 0.0,
            frequency: 0.0,
            phase: 0.0,
            restitution,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.amplitude, self.frequency, self.phase, self.restitution];
        if !all.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(
                "heave: all parameters must be finite".into(),
            ));
        }
        if self.amplitude < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "heave.amplitude: must be >= 0 (got {})",
                self.amplitude
            )));
        }
        if self.frequency < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "heave.frequency: must be >= 0 (got {})",
                self.frequency
            )));
        }
        if !(0.0..=1.0).contains(&self.restitution) {
            return Err(Error::InvalidParameter(format!(
                "heave.restitution: restitution out of [0, 1] (got {})",
                self.restitution
            )));
        }
        Ok(())
    }

    /// Angular frequency omega = 2 pi f (rad/s).
    pub fn angular_frequency(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.frequency
    }

    /// Peak deck speed 2 pi f A (m/s).
    pub fn velocity_amplitude(&self) -> f64 {
        self.angular_frequency() * self.amplitude
    }

    /// Deck height z_plat(t) = A sin(2 pi f t + phi).
    pub fn deck_position(&self, t: f64) -> f64 {
        self.amplitude * (self.angular_frequency() * t + self.phase).sin()
    }

    /// Deck heave rate zdot_plat(t) = 2 pi f A cos(2 pi f t + phi).
    pub fn deck_velocity(&self, t: f64) -> f64 {
        self.velocity_amplitude() * (self.angular_frequency() * t + self.phase).cos()
    }

    /// Deck heave acceleration zddot_plat(t) = -(2 pi f)^2 A sin(2 pi f t + phi).
    pub fn deck_acceleration(&self, t: f64) -> f64 {
        let omega = self.angular_frequency();
        -omega * omega * self.amplitude * (omega * t + self.phase).sin()
    }

    pub fn deck_state(&self, t: f64) -> DeckState {
        DeckState {
            position: self.deck_position(t),
            velocity: self.deck_velocity(t),
        }
    }
}
