//! Running estimate of the angular momentum the pendulum will carry at the
//! end of the current step.
//!
//! The estimate propagates the current state over the remaining stance time
//! with the momentum row of the closed-form transition:
//!
//! ```text
//! L_end(t) = m·H·ω·sinh(ω·(T − t))·p(t) + cosh(ω·(T − t))·L(t)
//! ```
//!
//! Along an undisturbed step this value is constant in `t`, which is what
//! lets the foot-placement law be evaluated at any moment of the step
//! instead of only at its end.

use crate::error::{Error, Result};
use crate::lip::PendulumState;
use crate::params::PendulumParams;

/// Predicts the angular momentum at the end of the current step.
///
/// Equals the momentum component of `flow(state, T − t)`; `state.time_in_step`
/// must lie inside `[0, T]`.
pub fn predict_step_end_momentum(state: &PendulumState, params: &PendulumParams) -> Result<f64> {
    let t = state.time_in_step;
    let period = params.step_duration;
    if !t.is_finite() || t < 0.0 || t > period {
        return Err(Error::OutOfWindow {
            t,
            step_duration: period,
        });
    }
    let phase = params.omega * (period - t);
    Ok(params.momentum_scale() * phase.sinh() * state.com_offset + phase.cosh() * state.momentum)
}
