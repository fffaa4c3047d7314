//! Discrete transition at step exchange.
//!
//! With constant CoM height and flat ground, the angular momentum about the
//! incoming contact point equals the angular momentum about the outgoing
//! one, so the impact conserves `L` exactly. The position coordinate is
//! relabeled: the CoM offset from the new stance contact is whatever offset
//! the swing foot landed with. Those two assumptions are preconditions of
//! the whole artifact; swing-leg dynamics are not modeled, so the commanded
//! placement is achieved exactly (tracking error is injected upstream by
//! the simulator when wanted).

use crate::error::{Error, Result};
use crate::lip::PendulumState;
use crate::params::PendulumParams;

/// Tolerance on `|t − T|` when checking that a state sits at the step end (s).
pub const STEP_END_TOLERANCE: f64 = 1e-12;

/// Default bound on commanded placement magnitude (m). Exceeding it is a
/// saturation event, not an error.
pub const DEFAULT_MAX_STEP_REACH: f64 = 1.0;

/// Commanded CoM-relative swing-foot target at the end of a step.
///
/// The value is CoM position minus foot position, positive forward: a foot
/// placed ahead of the CoM is a negative command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootPlacementCommand(pub f64);

impl FootPlacementCommand {
    /// Clamps the command to `|offset| <= max_reach`; the flag reports
    /// whether clamping changed the value.
    pub fn saturate(self, max_reach: f64) -> (FootPlacementCommand, bool) {
        if self.0.abs() > max_reach {
            (FootPlacementCommand(self.0.clamp(-max_reach, max_reach)), true)
        } else {
            (self, false)
        }
    }
}

/// Applies the step-exchange map to a state at the step end.
///
/// The returned state starts the next step: momentum is carried over
/// bit-identically, the CoM offset becomes the commanded placement, and the
/// step clock resets to zero.
pub fn apply_impact(
    pre: &PendulumState,
    placement: FootPlacementCommand,
    params: &PendulumParams,
) -> Result<PendulumState> {
    if (pre.time_in_step - params.step_duration).abs() > STEP_END_TOLERANCE {
        return Err(Error::NotAtStepEnd {
            actual: pre.time_in_step,
            expected: params.step_duration,
        });
    }
    if !placement.0.is_finite() {
        return Err(Error::invalid(
            "apply_impact",
            format!("placement must be finite, got {}", placement.0),
        ));
    }
    Ok(PendulumState {
        com_offset: placement.0,
        momentum: pre.momentum,
        time_in_step: 0.0,
    })
}
