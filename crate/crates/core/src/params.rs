//! Physical constants of the linear inverted pendulum.

use crate::error::{Error, Result};

/// Number of units in the last place allowed between `omega² · com_height`
/// and `gravity`. `omega` is computed as `sqrt(g/H)`; the square root,
/// the division and the two products each round once, so a consistent
/// parameter set can land a couple of ulps away from exact.
const OMEGA_CONSISTENCY_ULPS: f64 = 4.0;

/// Parameters of a point mass at constant height atop a massless leg.
///
/// The pendulum frequency `omega = sqrt(gravity / com_height)` makes the
/// closed-form step transition in [`crate::lip`] the exact solution of
///
/// ```text
/// d/dt p = L / (m·H)        d/dt L = m·g·p
/// ```
///
/// where `p` is the CoM offset from the stance contact and `L` the angular
/// momentum about that contact. `omega` is stored rather than recomputed so
/// that an inconsistent override is detectable; [`PendulumParams::new`]
/// always derives it from `gravity` and `com_height`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendulumParams {
    /// Total mass (kg).
    pub mass: f64,
    /// Constant CoM height above the ground (m).
    pub com_height: f64,
    /// Gravitational acceleration (m/s²).
    pub gravity: f64,
    /// Fixed duration of one step (s).
    pub step_duration: f64,
    /// Pendulum frequency sqrt(gravity / com_height) (1/s).
    pub omega: f64,
}

pub const DEFAULT_GRAVITY: f64 = 9.81;

impl PendulumParams {
    /// Builds a parameter set, deriving `omega` from `gravity / com_height`.
    pub fn new(mass: f64, com_height: f64, gravity: f64, step_duration: f64) -> Result<Self> {
        let omega = (gravity / com_height).sqrt();
        Self::from_parts(mass, com_height, gravity, step_duration, omega)
    }

    /// Builds a parameter set with an explicitly supplied `omega`.
    ///
    /// Fails unless `omega² · com_height` matches `gravity` to a few ulps,
    /// so a stale or corrupted frequency cannot enter a simulation.
    pub fn from_parts(
        mass: f64,
        com_height: f64,
        gravity: f64,
        step_duration: f64,
        omega: f64,
    ) -> Result<Self> {
        let positive = [
            ("mass", mass),
            ("com_height", com_height),
            ("gravity", gravity),
            ("step_duration", step_duration),
            ("omega", omega),
        ];
        for (field, value) in positive {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::config(
                    format!("params.{field}"),
                    format!("must be finite and > 0, got {value}"),
                ));
            }
        }
        let residual = (omega * omega * com_height - gravity).abs();
        if residual > OMEGA_CONSISTENCY_ULPS * f64::EPSILON * gravity {
            return Err(Error::config(
                "params.omega",
                format!(
                    "omega²·com_height = {} is inconsistent with gravity = {} \
                     (omega must equal sqrt(gravity/com_height))",
                    omega * omega * com_height,
                    gravity
                ),
            ));
        }
        Ok(Self {
            mass,
            com_height,
            gravity,
            step_duration,
            omega,
        })
    }

    /// Momentum scale `m·H·omega` pairing a CoM offset (m) with an angular
    /// momentum (kg·m²/s); the off-diagonal weight of the step transition.
    #[inline]
    pub fn momentum_scale(&self) -> f64 {
        self.mass * self.com_height * self.omega
    }
}

impl Default for PendulumParams {
    /// 32 kg mass at 0.9 m CoM height, 0.4 s steps.
    fn default() -> Self {
        Self::new(32.0, 0.9, DEFAULT_GRAVITY, 0.4).expect("default parameters are valid")
    }
}
