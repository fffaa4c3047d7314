//! Hybrid closed-loop executor: closed-form stance flow sampled on a grid,
//! controller invocation, impact at the step end, disturbance injection and
//! full trajectory logging.
//!
//! Within a step, every sampled state is computed as the exact closed-form
//! flow of the most recent discrete event (step start or momentum kick), so
//! refining the sample grid cannot change the step-end states. Impulsive
//! momentum kicks land at the first sample time at or after their
//! timestamp; per-step placement errors are added to the commanded
//! placement before reach clipping.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::controller::{desired_foot_placement, MomentumTarget};
use crate::error::{Error, Result};
use crate::estimator::predict_step_end_momentum;
use crate::impact::{apply_impact, FootPlacementCommand, DEFAULT_MAX_STEP_REACH};
use crate::lip::{flow, PendulumState};
use crate::params::PendulumParams;

/// How tightly `sample_dt` must divide the step duration (s).
pub const GRID_DIVISION_TOLERANCE: f64 = 1e-9;

/// Desired momentum at the end of a given step. The schedule is a step
/// function: each entry holds until the next one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetEntry {
    pub step: usize,
    pub value: TargetValue,
}

/// A regulation target, given either directly as a momentum or as a walking
/// speed (converted via `L = m·H·v`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetValue {
    Momentum(f64),
    Velocity(f64),
}

impl TargetValue {
    pub fn as_momentum(&self, params: &PendulumParams) -> f64 {
        match *self {
            TargetValue::Momentum(l) => l,
            TargetValue::Velocity(v) => crate::controller::velocity_to_momentum(v, params).0,
        }
    }

    fn raw(&self) -> f64 {
        match *self {
            TargetValue::Momentum(x) | TargetValue::Velocity(x) => x,
        }
    }
}

/// Impulsive angular-momentum disturbance at an absolute time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumKick {
    /// Absolute time (s); the kick lands at the first sample at or after it.
    pub time: f64,
    /// Added angular momentum (kg·m²/s).
    pub delta_momentum: f64,
}

/// Swing-tracking error for one step: added to the commanded placement
/// before clipping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacementError {
    pub step: usize,
    pub delta_offset: f64,
}

/// Seeded random momentum kicks, drawn uniformly over the scenario horizon
/// with amplitudes uniform in `[-max_abs_delta, +max_abs_delta]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomKicks {
    pub count: usize,
    pub max_abs_delta: f64,
}

/// When the placement command that feeds the impact is computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControllerMode {
    /// Recompute at every sample; the command in force at the step end is
    /// the one computed at the final sample.
    Continuous,
    /// Freeze the command at the first sample at or after `T − lead_time`.
    /// Samples before that log the running preview.
    AtDecision { lead_time: f64 },
}

/// Corruption of the velocity measurement seen by the baseline controller.
/// `dv_offset` is a constant bias (m/s); `lag` delays the momentum
/// measurement by the given time, clamped at the most recent discrete event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityNoise {
    pub dv_offset: f64,
    pub lag: f64,
}

impl VelocityNoise {
    pub fn none() -> Self {
        Self {
            dv_offset: 0.0,
            lag: 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.dv_offset == 0.0 && self.lag == 0.0
    }
}

/// Complete description of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub params: PendulumParams,
    pub initial: PendulumState,
    pub n_steps: usize,
    pub sample_dt: f64,
    /// Sorted by step index, strictly increasing; first entry (if any) must
    /// be step 0. Empty schedule regulates to zero momentum.
    pub targets: Vec<TargetEntry>,
    pub kicks: Vec<MomentumKick>,
    pub placement_errors: Vec<PlacementError>,
    pub random_kicks: Option<RandomKicks>,
    pub controller_mode: ControllerMode,
    pub baseline_noise: VelocityNoise,
    pub max_step_reach: f64,
    pub seed: u64,
}

impl ScenarioConfig {
    /// Minimal scenario: no disturbances, continuous controller, zero target.
    pub fn new(
        params: PendulumParams,
        initial: PendulumState,
        n_steps: usize,
        sample_dt: f64,
    ) -> Self {
        Self {
            params,
            initial,
            n_steps,
            sample_dt,
            targets: Vec::new(),
            kicks: Vec::new(),
            placement_errors: Vec::new(),
            random_kicks: None,
            controller_mode: ControllerMode::Continuous,
            baseline_noise: VelocityNoise::none(),
            max_step_reach: DEFAULT_MAX_STEP_REACH,
            seed: 0,
        }
    }

    /// Checks every semantic invariant, reporting the offending field.
    pub fn validate(&self) -> Result<()> {
        let period = self.params.step_duration;
        if !self.initial.is_finite() {
            return Err(Error::config("initial", "state must be finite"));
        }
        if self.initial.time_in_step < 0.0 || self.initial.time_in_step > period {
            return Err(Error::config(
                "initial.t",
                format!(
                    "time in step must lie in [0, {period}], got {}",
                    self.initial.time_in_step
                ),
            ));
        }
        if self.n_steps < 1 {
            return Err(Error::config("run.n_steps", "must be at least 1"));
        }
        if !self.sample_dt.is_finite() || self.sample_dt <= 0.0 {
            return Err(Error::config(
                "run.sample_dt",
                format!("must be finite and > 0, got {}", self.sample_dt),
            ));
        }
        let n_sub = (period / self.sample_dt).round();
        if n_sub < 1.0 || (n_sub * self.sample_dt - period).abs() > GRID_DIVISION_TOLERANCE {
            return Err(Error::config(
                "run.sample_dt",
                format!(
                    "must divide step_duration = {period} within {GRID_DIVISION_TOLERANCE}, got {}",
                    self.sample_dt
                ),
            ));
        }
        let mut prev_step: Option<usize> = None;
        for (i, entry) in self.targets.iter().enumerate() {
            if !entry.value.raw().is_finite() {
                return Err(Error::config(
                    format!("target[{i}]"),
                    "value must be finite",
                ));
            }
            if i == 0 && entry.step != 0 {
                return Err(Error::config(
                    "target[0].step",
                    "the first schedule entry must be step 0",
                ));
            }
            if let Some(prev) = prev_step {
                if entry.step <= prev {
                    return Err(Error::config(
                        format!("target[{i}].step"),
                        "step indices must be strictly increasing",
                    ));
                }
            }
            prev_step = Some(entry.step);
        }
        for (i, kick) in self.kicks.iter().enumerate() {
            if !kick.time.is_finite() || kick.time < 0.0 {
                return Err(Error::config(
                    format!("kick[{i}].t"),
                    format!("must be finite and >= 0, got {}", kick.time),
                ));
            }
            if !kick.delta_momentum.is_finite() {
                return Err(Error::config(format!("kick[{i}].dL"), "must be finite"));
            }
        }
        let mut prev_step: Option<usize> = None;
        for (i, pe) in self.placement_errors.iter().enumerate() {
            if !pe.delta_offset.is_finite() {
                return Err(Error::config(
                    format!("placement_error[{i}].dp"),
                    "must be finite",
                ));
            }
            if let Some(prev) = prev_step {
                if pe.step <= prev {
                    return Err(Error::config(
                        format!("placement_error[{i}].step"),
                        "step indices must be strictly increasing",
                    ));
                }
            }
            prev_step = Some(pe.step);
        }
        if let Some(rk) = &self.random_kicks {
            if rk.count > 100_000 {
                return Err(Error::config("kick_random.count", "must be <= 100000"));
            }
            if !rk.max_abs_delta.is_finite() || rk.max_abs_delta < 0.0 {
                return Err(Error::config(
                    "kick_random.max_abs_dL",
                    format!("must be finite and >= 0, got {}", rk.max_abs_delta),
                ));
            }
        }
        if let ControllerMode::AtDecision { lead_time } = self.controller_mode {
            if !lead_time.is_finite() || lead_time < 0.0 || lead_time > period {
                return Err(Error::config(
                    "controller.t_decide",
                    format!("must lie in [0, {period}], got {lead_time}"),
                ));
            }
        }
        if !self.baseline_noise.dv_offset.is_finite() {
            return Err(Error::config("baseline_noise.dv_offset", "must be finite"));
        }
        if !self.baseline_noise.lag.is_finite() || self.baseline_noise.lag < 0.0 {
            return Err(Error::config(
                "baseline_noise.lag",
                format!("must be finite and >= 0, got {}", self.baseline_noise.lag),
            ));
        }
        if !self.max_step_reach.is_finite() || self.max_step_reach <= 0.0 {
            return Err(Error::config(
                "run.max_step_reach",
                format!("must be finite and > 0, got {}", self.max_step_reach),
            ));
        }
        Ok(())
    }

    /// Desired momentum at the end of the given step (holds the last
    /// schedule entry; zero when the schedule is empty).
    pub fn target_for_step_end(&self, step: usize) -> f64 {
        let mut value = 0.0;
        for entry in &self.targets {
            if entry.step > step {
                break;
            }
            value = entry.value.as_momentum(&self.params);
        }
        value
    }

    fn placement_error_for(&self, step: usize) -> f64 {
        self.placement_errors
            .iter()
            .find(|pe| pe.step == step)
            .map_or(0.0, |pe| pe.delta_offset)
    }

    /// Explicit plus seeded random kicks, sorted by time.
    fn resolved_kicks(&self) -> Vec<MomentumKick> {
        let mut kicks = self.kicks.clone();
        if let Some(rk) = &self.random_kicks {
            let horizon = self.n_steps as f64 * self.params.step_duration;
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            for _ in 0..rk.count {
                let time = rng.gen_range(0.0..horizon);
                let delta = if rk.max_abs_delta > 0.0 {
                    rng.gen_range(-rk.max_abs_delta..=rk.max_abs_delta)
                } else {
                    0.0
                };
                kicks.push(MomentumKick {
                    time,
                    delta_momentum: delta,
                });
            }
        }
        kicks.sort_by(|a, b| a.time.partial_cmp(&b.time).expect("validated finite"));
        kicks
    }
}

/// Which placement law drives the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControllerKind {
    /// The momentum-regulating law fed exact state measurements.
    AngularMomentum,
    /// The same law fed a velocity measurement corrupted per
    /// [`ScenarioConfig::baseline_noise`].
    VelocityBaseline,
}

/// One row of the continuous record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    /// Absolute time (s).
    pub t_abs: f64,
    pub step: usize,
    pub com_offset: f64,
    pub momentum: f64,
    /// End-of-step momentum estimate, from the controller's (possibly
    /// corrupted) view of the state.
    pub predicted_end_momentum: f64,
    /// Placement command in force at this sample.
    pub placement_command: f64,
}

/// Record of one impact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepEvent {
    pub step: usize,
    /// Absolute time of the impact (s).
    pub t_abs: f64,
    pub pre: PendulumState,
    /// Raw controller output.
    pub commanded: FootPlacementCommand,
    /// After per-step placement error and reach clipping.
    pub applied: FootPlacementCommand,
    pub post: PendulumState,
    /// Desired momentum at the end of this step.
    pub target_momentum: f64,
    /// `|pre.momentum − target| / max(1, |target|)`.
    pub rel_error: f64,
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunSummary {
    pub step_rel_errors: Vec<f64>,
    pub max_rel_error: f64,
    pub n_saturated: usize,
    pub n_kicks_applied: usize,
}

/// Full record of a run: per-sample continuous states plus one event per
/// completed step.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub samples: Vec<Sample>,
    pub step_events: Vec<StepEvent>,
    pub summary: RunSummary,
}

/// Runs the scenario under the momentum-regulating controller.
pub fn run_scenario(config: &ScenarioConfig) -> Result<TrajectoryLog> {
    run_with_controller(config, ControllerKind::AngularMomentum)
}

/// Runs the scenario twice under identical disturbance realizations:
/// once with the momentum controller, once with the velocity baseline.
pub fn run_comparison(config: &ScenarioConfig) -> Result<(TrajectoryLog, TrajectoryLog)> {
    Ok((
        run_with_controller(config, ControllerKind::AngularMomentum)?,
        run_with_controller(config, ControllerKind::VelocityBaseline)?,
    ))
}

/// Runs the scenario under an explicitly chosen controller.
pub fn run_with_controller(
    config: &ScenarioConfig,
    kind: ControllerKind,
) -> Result<TrajectoryLog> {
    config.validate()?;
    let params = &config.params;
    let period = params.step_duration;
    let n_sub = (period / config.sample_dt).round() as usize;

    let kicks = config.resolved_kicks();
    let mut kick_idx = 0;
    let mut n_kicks_applied = 0;

    let mut samples = Vec::new();
    let mut events = Vec::with_capacity(config.n_steps);
    // Anchor of the current closed-form segment: the state at the most
    // recent discrete event (step start or kick).
    let mut base = config.initial;

    for step in 0..config.n_steps {
        let pursued = MomentumTarget(config.target_for_step_end(step + 1));
        let step_target = config.target_for_step_end(step);
        let decide_at = match config.controller_mode {
            ControllerMode::Continuous => None,
            ControllerMode::AtDecision { lead_time } => Some((period - lead_time).max(0.0)),
        };
        let mut frozen: Option<FootPlacementCommand> = None;

        let times = sample_times(step, base.time_in_step, config.sample_dt, n_sub, period);
        let last = times.len() - 1;
        for (i, &t) in times.iter().enumerate() {
            let mut state = if t > base.time_in_step {
                flow(&base, t - base.time_in_step, params)?
            } else {
                base
            };
            if i == last {
                // The flow lands within rounding of the step end; pin the
                // clock so the impact precondition is met exactly.
                state.time_in_step = period;
            }
            if !state.is_finite() {
                return Err(Error::Internal {
                    step,
                    message: format!("non-finite state at t = {t}"),
                });
            }
            let t_abs = step as f64 * period + t;

            while kick_idx < kicks.len() && kicks[kick_idx].time <= t_abs {
                state.momentum += kicks[kick_idx].delta_momentum;
                kick_idx += 1;
                n_kicks_applied += 1;
                base = state;
            }

            let view = controller_view(&state, &base, kind, config);
            let predicted = predict_step_end_momentum(&view, params)?;
            let instantaneous = desired_foot_placement(&view, pursued, params)?;
            let command = match decide_at {
                None => instantaneous,
                Some(t_dec) => {
                    if frozen.is_none() && t >= t_dec - 1e-12 {
                        frozen = Some(instantaneous);
                    }
                    frozen.unwrap_or(instantaneous)
                }
            };

            samples.push(Sample {
                t_abs,
                step,
                com_offset: state.com_offset,
                momentum: state.momentum,
                predicted_end_momentum: predicted,
                placement_command: command.0,
            });

            if i == last {
                let raw = FootPlacementCommand(command.0 + config.placement_error_for(step));
                let (applied, saturated) = raw.saturate(config.max_step_reach);
                let post = apply_impact(&state, applied, params)?;
                let rel_error =
                    (state.momentum - step_target).abs() / step_target.abs().max(1.0);
                events.push(StepEvent {
                    step,
                    t_abs,
                    pre: state,
                    commanded: command,
                    applied,
                    post,
                    target_momentum: step_target,
                    rel_error,
                    saturated,
                });
                base = post;
            }
        }
    }

    let step_rel_errors: Vec<f64> = events.iter().map(|e| e.rel_error).collect();
    let summary = RunSummary {
        max_rel_error: step_rel_errors.iter().cloned().fold(0.0, f64::max),
        step_rel_errors,
        n_saturated: events.iter().filter(|e| e.saturated).count(),
        n_kicks_applied,
    };
    Ok(TrajectoryLog {
        samples,
        step_events: events,
        summary,
    })
}

/// Within-step sample times for one step. Step 0 starts at the initial
/// time; later steps skip t = 0 (the post-impact state is already recorded
/// in the step event and would duplicate `t_abs` of the previous sample).
/// The final entry is the step duration itself.
fn sample_times(step: usize, start_t: f64, dt: f64, n_sub: usize, period: f64) -> Vec<f64> {
    let mut times = Vec::with_capacity(n_sub + 1);
    if step == 0 {
        if period - start_t <= 1e-12 {
            times.push(period);
            return times;
        }
        times.push(start_t);
        for i in 1..n_sub {
            let t = i as f64 * dt;
            if t > start_t + 1e-12 && t < period - 1e-12 {
                times.push(t);
            }
        }
    } else {
        for i in 1..n_sub {
            times.push(i as f64 * dt);
        }
    }
    times.push(period);
    times
}

/// The state as seen by the given controller. The baseline's momentum is
/// reconstructed from a velocity measurement subject to the configured lag
/// and offset; the momentum controller sees the state as-is.
fn controller_view(
    state: &PendulumState,
    base: &PendulumState,
    kind: ControllerKind,
    config: &ScenarioConfig,
) -> PendulumState {
    let noise = &config.baseline_noise;
    if kind == ControllerKind::AngularMomentum || noise.is_zero() {
        return *state;
    }
    let params = &config.params;
    let mut momentum = state.momentum;
    if noise.lag > 0.0 {
        let lagged_t = (state.time_in_step - noise.lag).max(base.time_in_step);
        momentum = flow(base, lagged_t - base.time_in_step, params)
            .expect("lagged flow over a validated interval")
            .momentum;
    }
    momentum += params.mass * params.com_height * noise.dv_offset;
    PendulumState {
        com_offset: state.com_offset,
        momentum,
        time_in_step: state.time_in_step,
    }
}
