//! Step-to-step map construction and closed-loop verification.
//!
//! The step-to-step (return) map of the open-loop pendulum is the
//! closed-form transition over one step duration; its eigenvalues
//! `e^{±ωT}` expose the unstable mode that foot placement exists to tame.
//! Substituting the placement law into the next-step momentum prediction
//! cancels the momentum recursion entirely — the closed-loop momentum-error
//! eigenvalue is zero, i.e. any momentum error dies within one step.
//! [`verify_deadbeat`] certifies that cancellation numerically over a
//! randomized envelope of states and targets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::controller::{desired_foot_placement, predict_next_step_end_momentum, MomentumTarget};
use crate::error::Result;
use crate::impact::apply_impact;
use crate::lip::{flow, transition_matrix, PendulumState};
use crate::params::PendulumParams;

/// Maximum allowed relative error for the one-step regulation property.
pub const DEADBEAT_TOLERANCE: f64 = 1e-9;
/// Open-loop eigenvalue product must sit within this distance of 1.
pub const SPECTRUM_PRODUCT_TOLERANCE: f64 = 1e-10;
/// Open-loop eigenvalues must match `e^{±ωT}` to this relative error.
pub const EIGENVALUE_MATCH_TOLERANCE: f64 = 1e-10;
/// Closed-loop momentum eigenvalue residual bound, relative to `cosh(ωT)`.
pub const CLOSED_LOOP_RESIDUAL_TOLERANCE: f64 = 1e-12;

/// Sampling envelope for [`verify_deadbeat`]: |p| ≤ 0.5 m, |L| and the
/// target within ±2 m/s of equivalent CoM speed, t anywhere in the step.
pub const ENVELOPE_MAX_OFFSET: f64 = 0.5;
pub const ENVELOPE_MAX_SPEED: f64 = 2.0;

/// Step-to-step linearization of one full step cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMap {
    /// Transition of `[p; L]` from step start to step end (the closed-form
    /// matrix over one step duration).
    pub a: [[f64; 2]; 2],
    /// Sensitivity of the next step-start state to the placement command:
    /// the relabel map writes the command straight into the offset and
    /// leaves momentum untouched.
    pub b_placement: [f64; 2],
    /// Numerically measured eigenvalue of the momentum-error recursion with
    /// the placement law in the loop. Analytically zero.
    pub closed_loop_momentum_eigen: f64,
}

impl StepMap {
    pub fn det(&self) -> f64 {
        self.a[0][0] * self.a[1][1] - self.a[0][1] * self.a[1][0]
    }

    /// Eigenvalues of the open-loop step map, larger magnitude first.
    /// Real for any valid parameters (`trace²/4 − det = sinh²(ωT) ≥ 0`).
    pub fn open_loop_eigenvalues(&self) -> (f64, f64) {
        let half_trace = 0.5 * (self.a[0][0] + self.a[1][1]);
        let disc = (half_trace * half_trace - self.det()).max(0.0).sqrt();
        (half_trace + disc, half_trace - disc)
    }
}

/// Builds the step map and measures the closed-loop momentum eigenvalue.
pub fn build_step_map(params: &PendulumParams) -> StepMap {
    StepMap {
        a: transition_matrix(params.step_duration, params),
        b_placement: [1.0, 0.0],
        closed_loop_momentum_eigen: measure_closed_loop_eigen(params),
    }
}

/// Difference quotient of the momentum recursion with the controller
/// substituted in: how much the achieved next-step-end momentum moves per
/// unit of current momentum. The two `cosh(ωT)` terms cancel exactly in
/// the algebra; what remains is floating-point residue.
fn measure_closed_loop_eigen(params: &PendulumParams) -> f64 {
    let scale = params.momentum_scale();
    let target = MomentumTarget(0.7 * scale / params.omega);
    let probe = |momentum: f64| -> f64 {
        let state = PendulumState::new(0.03, momentum, 0.1 * params.step_duration);
        let cmd = desired_foot_placement(&state, target, params)
            .expect("probe state is inside the step window");
        predict_next_step_end_momentum(&state, cmd, params)
            .expect("probe state is inside the step window")
    };
    let l1 = 0.5 * scale / params.omega;
    let l2 = 1.0 * scale / params.omega;
    (probe(l2) - probe(l1)) / (l2 - l1)
}

/// Outcome of the randomized one-step regulation check.
#[derive(Debug, Clone, PartialEq)]
pub struct DeadbeatReport {
    pub n_samples: usize,
    pub seed: u64,
    /// Max of `|L_next_end − L_des| / max(1, |L_des|)` over all samples.
    pub max_rel_error: f64,
    pub mean_rel_error: f64,
    /// Max relative error grouped by the decile of the sampled in-step
    /// time; a causal law shows no trend across them.
    pub decile_max: [f64; 10],
    pub tolerance: f64,
    pub passed: bool,
}

/// Samples random (state, target) pairs in the documented envelope, plays
/// the flow → impact → flow composition with the placement law, and reports
/// how far the achieved momentum lands from the target.
pub fn verify_deadbeat(params: &PendulumParams, n_random: usize, seed: u64) -> Result<DeadbeatReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let momentum_bound = ENVELOPE_MAX_SPEED * params.mass * params.com_height;
    let period = params.step_duration;

    let mut max_rel_error = 0.0f64;
    let mut sum = 0.0f64;
    let mut decile_max = [0.0f64; 10];

    for _ in 0..n_random {
        let state = PendulumState::new(
            rng.gen_range(-ENVELOPE_MAX_OFFSET..=ENVELOPE_MAX_OFFSET),
            rng.gen_range(-momentum_bound..=momentum_bound),
            rng.gen_range(0.0..=period),
        );
        let target = MomentumTarget(rng.gen_range(-momentum_bound..=momentum_bound));

        let cmd = desired_foot_placement(&state, target, params)?;
        let pre = flow(&state, period - state.time_in_step, params)?;
        let post = apply_impact(&pre, cmd, params)?;
        let achieved = flow(&post, period, params)?.momentum;

        let rel = (achieved - target.0).abs() / target.0.abs().max(1.0);
        max_rel_error = max_rel_error.max(rel);
        sum += rel;
        let decile = ((state.time_in_step / period) * 10.0).floor().min(9.0) as usize;
        decile_max[decile] = decile_max[decile].max(rel);
    }

    Ok(DeadbeatReport {
        n_samples: n_random,
        seed,
        max_rel_error,
        mean_rel_error: if n_random > 0 { sum / n_random as f64 } else { 0.0 },
        decile_max,
        tolerance: DEADBEAT_TOLERANCE,
        passed: max_rel_error <= DEADBEAT_TOLERANCE,
    })
}
