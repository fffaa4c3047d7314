//! Foot-placement law regulating the angular momentum at the end of the
//! *next* step.
//!
//! Composing the three phases of a step cycle — stance flow to the step
//! end, momentum-conserving impact, stance flow over the following step —
//! gives the momentum at the end of the next step as an affine function of
//! the placement chosen now:
//!
//! ```text
//! L_next_end = m·H·ω·sinh(ω·T)·placement + cosh(ω·T)·L_end
//! ```
//!
//! where `L_end` is the running end-of-step estimate from
//! [`crate::estimator`]. Solving for the placement that makes `L_next_end`
//! hit a desired value yields the control law in
//! [`desired_foot_placement`]. Because `L_end` is constant along the
//! undisturbed step, so is the command: it can be evaluated at any sample
//! time, and one step later the regulated momentum lands on the target
//! exactly (a one-step deadbeat law).
//!
//! [`baseline_velocity_placement`] is the same law parameterized by a
//! desired CoM velocity instead of a momentum. On the rigid pendulum with
//! exact state measurements the two are identical; they part ways only when
//! the simulator corrupts the velocity measurement it feeds the baseline.

use crate::error::Result;
use crate::estimator::predict_step_end_momentum;
use crate::impact::FootPlacementCommand;
use crate::lip::PendulumState;
use crate::params::PendulumParams;

/// Desired angular momentum about the upcoming stance contact at the end of
/// the next step (kg·m²/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumTarget(pub f64);

/// Chooses the end-of-step placement that lands the end-of-next-step
/// momentum on `target`.
///
/// `p_des = (L_des − cosh(ω·T)·L_end) / (m·H·ω·sinh(ω·T))`; the denominator
/// is positive for any valid step duration.
pub fn desired_foot_placement(
    state: &PendulumState,
    target: MomentumTarget,
    params: &PendulumParams,
) -> Result<FootPlacementCommand> {
    let l_end = predict_step_end_momentum(state, params)?;
    let phase = params.omega * params.step_duration;
    Ok(FootPlacementCommand(
        (target.0 - phase.cosh() * l_end) / (params.momentum_scale() * phase.sinh()),
    ))
}

/// Predicts the end-of-next-step momentum produced by holding the current
/// step to its end and landing the swing foot at `placement`.
pub fn predict_next_step_end_momentum(
    state: &PendulumState,
    placement: FootPlacementCommand,
    params: &PendulumParams,
) -> Result<f64> {
    let l_end = predict_step_end_momentum(state, params)?;
    let phase = params.omega * params.step_duration;
    Ok(params.momentum_scale() * phase.sinh() * placement.0 + phase.cosh() * l_end)
}

/// Converts a walking-speed target to the equivalent momentum target,
/// `L = m·H·v`.
pub fn velocity_to_momentum(v_des: f64, params: &PendulumParams) -> MomentumTarget {
    MomentumTarget(params.mass * params.com_height * v_des)
}

/// Velocity-parameterized placement law used as the comparison baseline.
///
/// Definitionally `desired_foot_placement` aimed at `m·H·v_des`; the
/// interesting behavior comes from callers handing it a state whose
/// momentum was reconstructed from a corrupted velocity measurement.
pub fn baseline_velocity_placement(
    state: &PendulumState,
    v_des: f64,
    params: &PendulumParams,
) -> Result<FootPlacementCommand> {
    desired_foot_placement(state, velocity_to_momentum(v_des, params), params)
}
