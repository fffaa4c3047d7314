//! Closed-form flow of the linear inverted pendulum with angular-momentum
//! state, plus an independent Runge-Kutta integrator used to cross-check it.
//!
//! The within-step dynamics are linear:
//!
//! ```text
//! d/dt [p; L] = [[0, 1/(m·H)], [m·g, 0]] · [p; L]
//! ```
//!
//! whose exact solution over an interval `dt` is the matrix
//!
//! ```text
//! M(dt) = [[cosh(ω·dt),        sinh(ω·dt)/(m·H·ω)],
//!          [m·H·ω·sinh(ω·dt),  cosh(ω·dt)       ]]
//! ```
//!
//! with `ω = sqrt(g/H)`. The momentum row is the propagation every estimate
//! in this crate is built on; the position row is the unique completion that
//! makes `M` the exponential of the generator above (so `det M(dt) = 1` for
//! every `dt`). [`integrate_rk4`] deliberately goes through [`derivative`]
//! only, never through `M`, so the two paths stay independent.

use crate::error::{Error, Result};
use crate::params::PendulumParams;

/// Within-step state of the pendulum, expressed relative to the current
/// stance contact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendulumState {
    /// CoM position minus stance-contact position, positive forward (m).
    pub com_offset: f64,
    /// Angular momentum about the stance contact (kg·m²/s).
    pub momentum: f64,
    /// Time since the start of the current step (s).
    pub time_in_step: f64,
}

impl PendulumState {
    pub fn new(com_offset: f64, momentum: f64, time_in_step: f64) -> Self {
        Self {
            com_offset,
            momentum,
            time_in_step,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.com_offset.is_finite() && self.momentum.is_finite() && self.time_in_step.is_finite()
    }
}

/// Closed-form transition matrix `M(dt)` mapping `[p; L]` across `dt` seconds.
pub fn transition_matrix(dt: f64, params: &PendulumParams) -> [[f64; 2]; 2] {
    let phase = params.omega * dt;
    let c = phase.cosh();
    let s = phase.sinh();
    let scale = params.momentum_scale();
    [[c, s / scale], [scale * s, c]]
}

/// Advances the state by `dt` seconds of stance flow.
pub fn flow(state: &PendulumState, dt: f64, params: &PendulumParams) -> Result<PendulumState> {
    if !state.is_finite() {
        return Err(Error::invalid("flow", format!("non-finite state {state:?}")));
    }
    if !dt.is_finite() || dt < 0.0 {
        return Err(Error::invalid(
            "flow",
            format!("dt must be finite and >= 0, got {dt}"),
        ));
    }
    let m = transition_matrix(dt, params);
    Ok(PendulumState {
        com_offset: m[0][0] * state.com_offset + m[0][1] * state.momentum,
        momentum: m[1][0] * state.com_offset + m[1][1] * state.momentum,
        time_in_step: state.time_in_step + dt,
    })
}

/// Continuous-time generator: `(dp/dt, dL/dt) = (L/(m·H), m·g·p)`.
pub fn derivative(state: &PendulumState, params: &PendulumParams) -> Result<(f64, f64)> {
    if !state.is_finite() {
        return Err(Error::invalid(
            "derivative",
            format!("non-finite state {state:?}"),
        ));
    }
    Ok((
        state.momentum / (params.mass * params.com_height),
        params.mass * params.gravity * state.com_offset,
    ))
}

/// Classical 4th-order Runge-Kutta integration of [`derivative`] over `dt`,
/// in substeps of at most `substep` seconds. A final partial substep is
/// shortened so the integration never overshoots `dt`.
///
/// This is the verification oracle for [`flow`]; it shares nothing with the
/// closed form beyond the generator.
pub fn integrate_rk4(
    state: &PendulumState,
    dt: f64,
    substep: f64,
    params: &PendulumParams,
) -> Result<PendulumState> {
    if !state.is_finite() {
        return Err(Error::invalid(
            "integrate_rk4",
            format!("non-finite state {state:?}"),
        ));
    }
    if !dt.is_finite() || dt < 0.0 {
        return Err(Error::invalid(
            "integrate_rk4",
            format!("dt must be finite and >= 0, got {dt}"),
        ));
    }
    if dt == 0.0 {
        return Ok(*state);
    }
    if !substep.is_finite() || substep <= 0.0 || substep > dt {
        return Err(Error::invalid(
            "integrate_rk4",
            format!("substep must satisfy 0 < substep <= dt, got {substep} with dt = {dt}"),
        ));
    }

    let n_full = (dt / substep).floor() as u64;
    let remainder = dt - n_full as f64 * substep;

    let mut p = state.com_offset;
    let mut l = state.momentum;
    for i in 0..=n_full {
        let h = if i < n_full { substep } else { remainder };
        if h <= 0.0 {
            continue;
        }
        let (k1p, k1l) = deriv_raw(p, l, params);
        let (k2p, k2l) = deriv_raw(p + 0.5 * h * k1p, l + 0.5 * h * k1l, params);
        let (k3p, k3l) = deriv_raw(p + 0.5 * h * k2p, l + 0.5 * h * k2l, params);
        let (k4p, k4l) = deriv_raw(p + h * k3p, l + h * k3l, params);
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        l += h / 6.0 * (k1l + 2.0 * k2l + 2.0 * k3l + k4l);
    }

    Ok(PendulumState {
        com_offset: p,
        momentum: l,
        time_in_step: state.time_in_step + dt,
    })
}

#[inline]
fn deriv_raw(p: f64, l: f64, params: &PendulumParams) -> (f64, f64) {
    (
        l / (params.mass * params.com_height),
        params.mass * params.gravity * p,
    )
}
