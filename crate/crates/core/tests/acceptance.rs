//! Acceptance gate: one test per verification criterion, each printing a
//! PASS line with the measured figure next to its pinned tolerance.
//! (Criterion 8, byte-identical CLI output, lives in the CLI crate's
//! acceptance suite.)

use lipwalk::analysis::{
    build_step_map, verify_deadbeat, CLOSED_LOOP_RESIDUAL_TOLERANCE, DEADBEAT_TOLERANCE,
    EIGENVALUE_MATCH_TOLERANCE, SPECTRUM_PRODUCT_TOLERANCE,
};
use lipwalk::controller::{desired_foot_placement, MomentumTarget};
use lipwalk::estimator::predict_step_end_momentum;
use lipwalk::lip::{flow, integrate_rk4};
use lipwalk::simulator::{
    run_comparison, run_scenario, ControllerMode, MomentumKick, PlacementError, RandomKicks,
    ScenarioConfig, TargetEntry, TargetValue, TrajectoryLog, VelocityNoise,
};
use lipwalk::{PendulumParams, PendulumState};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CAUSALITY_TOLERANCE: f64 = 1e-10;
const ORACLE_TOLERANCE: f64 = 1e-8;
const ORACLE_SUBSTEP: f64 = 1e-5;

fn params() -> PendulumParams {
    PendulumParams::default()
}

fn random_state(rng: &mut ChaCha8Rng, p: &PendulumParams, with_time: bool) -> PendulumState {
    let momentum_bound = 2.0 * p.mass * p.com_height;
    PendulumState::new(
        rng.gen_range(-0.5..=0.5),
        rng.gen_range(-momentum_bound..=momentum_bound),
        if with_time {
            rng.gen_range(0.0..=p.step_duration)
        } else {
            0.0
        },
    )
}

#[test]
fn acceptance_1_deadbeat_regulation() {
    let report = verify_deadbeat(&params(), 1000, 2024).unwrap();
    assert!(
        report.passed,
        "max relative error {} exceeds {}",
        report.max_rel_error, report.tolerance
    );
    println!(
        "ACCEPTANCE 1 deadbeat regulation: PASS (n = {}, max rel error {:.3e} <= {:.0e})",
        report.n_samples, report.max_rel_error, DEADBEAT_TOLERANCE
    );
}

#[test]
fn acceptance_2_causality_time_invariance() {
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_estimate = 0.0f64;
    let mut worst_placement = 0.0f64;

    for _ in 0..20 {
        let start = random_state(&mut rng, &p, false);
        let momentum_bound = 2.0 * p.mass * p.com_height;
        let target = MomentumTarget(rng.gen_range(-momentum_bound..=momentum_bound));

        let mut estimates = Vec::with_capacity(100);
        let mut placements = Vec::with_capacity(100);
        for i in 0..100 {
            let t = i as f64 / 99.0 * p.step_duration;
            let mut state = flow(&start, t, &p).unwrap();
            state.time_in_step = state.time_in_step.min(p.step_duration);
            estimates.push(predict_step_end_momentum(&state, &p).unwrap());
            placements.push(desired_foot_placement(&state, target, &p).unwrap().0);
        }

        let spread = |values: &[f64]| -> f64 {
            let max = values.iter().cloned().fold(f64::MIN, f64::max);
            let min = values.iter().cloned().fold(f64::MAX, f64::min);
            let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-3);
            (max - min) / scale
        };
        worst_estimate = worst_estimate.max(spread(&estimates));
        worst_placement = worst_placement.max(spread(&placements));
    }

    assert!(
        worst_estimate <= CAUSALITY_TOLERANCE,
        "end-of-step estimate varied by {worst_estimate}"
    );
    assert!(
        worst_placement <= CAUSALITY_TOLERANCE,
        "placement command varied by {worst_placement}"
    );
    println!(
        "ACCEPTANCE 2 causality/time-invariance: PASS (estimate spread {:.3e}, command spread {:.3e} <= {:.0e})",
        worst_estimate, worst_placement, CAUSALITY_TOLERANCE
    );
}

#[test]
fn acceptance_3_oracle_equivalence_and_convergence() {
    let p = params();
    let dt = p.step_duration;
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    let mut worst = 0.0f64;
    for _ in 0..100 {
        let s = random_state(&mut rng, &p, false);
        let closed = flow(&s, dt, &p).unwrap();
        let oracle = integrate_rk4(&s, dt, ORACLE_SUBSTEP, &p).unwrap();
        let scale = p.momentum_scale();
        let p_rel = (closed.com_offset - oracle.com_offset).abs()
            / closed
                .com_offset
                .abs()
                .max(1e-6 * (s.com_offset.abs() + s.momentum.abs() / scale));
        let l_rel = (closed.momentum - oracle.momentum).abs()
            / closed
                .momentum
                .abs()
                .max(1e-6 * (s.com_offset.abs() * scale + s.momentum.abs()));
        worst = worst.max(p_rel).max(l_rel);
    }
    assert!(
        worst <= ORACLE_TOLERANCE,
        "worst flow-vs-RK4 relative error {worst}"
    );

    // Order-4 convergence, measured where truncation dominates roundoff.
    let s = PendulumState::new(0.05, 2.0, 0.0);
    let reference = flow(&s, dt, &p).unwrap();
    let err = |substep: f64| {
        let out = integrate_rk4(&s, dt, substep, &p).unwrap();
        ((out.com_offset - reference.com_offset).powi(2)
            + ((out.momentum - reference.momentum) / p.momentum_scale()).powi(2))
        .sqrt()
    };
    let ratio_coarse = err(0.02) / err(0.01);
    let ratio_fine = err(0.01) / err(0.005);
    for ratio in [ratio_coarse, ratio_fine] {
        assert!(
            (13.0..=19.0).contains(&ratio),
            "halving ratio {ratio} outside 16 ± 3"
        );
    }
    println!(
        "ACCEPTANCE 3 oracle equivalence: PASS (worst rel error {:.3e} <= {:.0e}; halving ratios {:.2}, {:.2} in 16 ± 3)",
        worst, ORACLE_TOLERANCE, ratio_coarse, ratio_fine
    );
}

/// The scenario corpus shared by the conservation criterion: every flavor
/// of run the simulator supports.
fn scenario_corpus() -> Vec<ScenarioConfig> {
    let p = params();
    let mut corpus = Vec::new();

    // Equilibrium.
    corpus.push(ScenarioConfig::new(
        p,
        PendulumState::new(0.0, 0.0, 0.0),
        6,
        0.01,
    ));

    // Steady walk from rest.
    let mut walk = ScenarioConfig::new(p, PendulumState::new(0.0, 0.0, 0.0), 12, 0.01);
    walk.targets = vec![TargetEntry {
        step: 0,
        value: TargetValue::Velocity(0.8),
    }];
    corpus.push(walk);

    // Kicked, including a kick exactly on a step boundary.
    let mut kicked = ScenarioConfig::new(p, PendulumState::new(0.05, 2.0, 0.0), 10, 0.01);
    kicked.targets = vec![TargetEntry {
        step: 0,
        value: TargetValue::Momentum(10.0),
    }];
    kicked.kicks = vec![
        MomentumKick {
            time: 1.4,
            delta_momentum: 8.64,
        },
        MomentumKick {
            time: 2.0 * p.step_duration,
            delta_momentum: -3.0,
        },
    ];
    corpus.push(kicked);

    // Swing-tracking errors plus a saturating target jump.
    let mut rough = ScenarioConfig::new(p, PendulumState::new(0.0, 0.0, 0.0), 10, 0.02);
    rough.targets = vec![
        TargetEntry {
            step: 0,
            value: TargetValue::Momentum(5.0),
        },
        TargetEntry {
            step: 4,
            value: TargetValue::Momentum(400.0),
        },
    ];
    rough.placement_errors = vec![
        PlacementError {
            step: 1,
            delta_offset: 0.03,
        },
        PlacementError {
            step: 6,
            delta_offset: -0.05,
        },
    ];
    corpus.push(rough);

    // Frozen-command mode with a late kick.
    let mut frozen = ScenarioConfig::new(p, PendulumState::new(0.02, -1.0, 0.0), 8, 0.01);
    frozen.targets = vec![TargetEntry {
        step: 0,
        value: TargetValue::Momentum(6.0),
    }];
    frozen.controller_mode = ControllerMode::AtDecision { lead_time: 0.1 };
    frozen.kicks = vec![MomentumKick {
        time: 3.95 * p.step_duration,
        delta_momentum: 4.0,
    }];
    corpus.push(frozen);

    // Seeded random kicks.
    let mut noisy = ScenarioConfig::new(p, PendulumState::new(0.0, 0.0, 0.0), 10, 0.01);
    noisy.targets = vec![TargetEntry {
        step: 0,
        value: TargetValue::Velocity(0.5),
    }];
    noisy.random_kicks = Some(RandomKicks {
        count: 5,
        max_abs_delta: 5.0,
    });
    noisy.seed = 99;
    corpus.push(noisy);

    corpus
}

#[test]
fn acceptance_4_impact_conservation() {
    let mut events = 0usize;
    let mut logs: Vec<TrajectoryLog> = Vec::new();
    for config in scenario_corpus() {
        logs.push(run_scenario(&config).unwrap());
        let mut with_noise = config.clone();
        with_noise.baseline_noise = VelocityNoise {
            dv_offset: 0.1,
            lag: 0.0,
        };
        let (am, baseline) = run_comparison(&with_noise).unwrap();
        logs.push(am);
        logs.push(baseline);
    }
    for log in &logs {
        for e in &log.step_events {
            assert_eq!(
                e.post.momentum.to_bits(),
                e.pre.momentum.to_bits(),
                "momentum changed across impact at step {}",
                e.step
            );
            events += 1;
        }
    }
    println!(
        "ACCEPTANCE 4 impact conservation: PASS ({events} step events across {} runs, all bit-identical)",
        logs.len()
    );
}

#[test]
fn acceptance_5_step_map_spectrum() {
    let p = params();
    let map = build_step_map(&p);
    let (lambda_plus, lambda_minus) = map.open_loop_eigenvalues();
    let phase = p.omega * p.step_duration;

    let plus_err = (lambda_plus - phase.exp()).abs() / phase.exp();
    let minus_err = (lambda_minus - (-phase).exp()).abs() / (-phase).exp();
    assert!(plus_err <= EIGENVALUE_MATCH_TOLERANCE, "e^{{+wT}} error {plus_err}");
    assert!(minus_err <= EIGENVALUE_MATCH_TOLERANCE, "e^{{-wT}} error {minus_err}");

    let product_err = (lambda_plus * lambda_minus - 1.0).abs();
    assert!(
        product_err <= SPECTRUM_PRODUCT_TOLERANCE,
        "eigenvalue product off by {product_err}"
    );

    let closed_bound = CLOSED_LOOP_RESIDUAL_TOLERANCE * phase.cosh();
    assert!(
        map.closed_loop_momentum_eigen.abs() <= closed_bound,
        "closed-loop eigenvalue residual {}",
        map.closed_loop_momentum_eigen
    );
    println!(
        "ACCEPTANCE 5 step-map spectrum: PASS (eigenvalues {:.6}, {:.6}; product error {:.3e} <= {:.0e}; closed-loop residual {:.3e} <= {:.3e})",
        lambda_plus, lambda_minus, product_err, SPECTRUM_PRODUCT_TOLERANCE,
        map.closed_loop_momentum_eigen.abs(), closed_bound
    );
}

#[test]
fn acceptance_6_disturbance_recovery() {
    let p = params();
    let mut config = ScenarioConfig::new(p, PendulumState::new(0.0, 0.0, 0.0), 8, 0.01);
    config.targets = vec![TargetEntry {
        step: 0,
        value: TargetValue::Momentum(10.0),
    }];
    let kicked_step = 3usize;
    let delta = 0.3 * p.mass * p.com_height;
    config.kicks = vec![MomentumKick {
        time: (kicked_step as f64 + 0.5) * p.step_duration,
        delta_momentum: delta,
    }];

    let log = run_scenario(&config).unwrap();
    let missed = log.step_events[kicked_step].rel_error;
    let recovered = log.step_events[kicked_step + 1].rel_error;
    assert!(missed > 1e-3, "kick of {delta} must disturb step {kicked_step}");
    assert!(
        recovered <= DEADBEAT_TOLERANCE,
        "step {} still off target by {recovered}",
        kicked_step + 1
    );
    // Exactly one step of recovery: every controlled step except the kicked
    // one is on target.
    for e in &log.step_events[1..] {
        if e.step != kicked_step {
            assert!(e.rel_error <= DEADBEAT_TOLERANCE, "step {}: {}", e.step, e.rel_error);
        }
    }
    println!(
        "ACCEPTANCE 6 disturbance recovery: PASS (dL = {delta:.2}: step {kicked_step} misses by {missed:.3e}, step {} back to {recovered:.3e} <= {:.0e})",
        kicked_step + 1, DEADBEAT_TOLERANCE
    );
}

#[test]
fn acceptance_7_comparison_harness() {
    let p = params();
    let mut config = ScenarioConfig::new(p, PendulumState::new(0.05, 2.0, 0.0), 20, 0.01);
    config.targets = vec![TargetEntry {
        step: 0,
        value: TargetValue::Velocity(0.8),
    }];

    // Zero corruption: the two controllers are the same arithmetic.
    let (am, baseline) = run_comparison(&config).unwrap();
    assert_eq!(am.samples.len(), baseline.samples.len());
    for (a, b) in am.samples.iter().zip(&baseline.samples) {
        assert_eq!(a.com_offset.to_bits(), b.com_offset.to_bits());
        assert_eq!(a.momentum.to_bits(), b.momentum.to_bits());
        assert_eq!(
            a.predicted_end_momentum.to_bits(),
            b.predicted_end_momentum.to_bits()
        );
        assert_eq!(a.placement_command.to_bits(), b.placement_command.to_bits());
    }
    for (a, b) in am.step_events.iter().zip(&baseline.step_events) {
        assert_eq!(a.pre.momentum.to_bits(), b.pre.momentum.to_bits());
        assert_eq!(a.applied.0.to_bits(), b.applied.0.to_bits());
        assert_eq!(a.post.com_offset.to_bits(), b.post.com_offset.to_bits());
    }

    // Persistent velocity offset: the command in force is computed at the
    // final sample of each step (remaining phase zero), so the baseline's
    // per-step momentum error settles at cosh(wT)·m·H·dv while the
    // momentum controller stays exact.
    let dv = 0.1;
    config.baseline_noise = VelocityNoise {
        dv_offset: dv,
        lag: 0.0,
    };
    let (am, baseline) = run_comparison(&config).unwrap();
    let expected = (p.omega * p.step_duration).cosh() * p.mass * p.com_height * dv;
    let mut worst_match = 0.0f64;
    for e in &baseline.step_events[1..] {
        let err = (e.pre.momentum - e.target_momentum).abs();
        worst_match = worst_match.max((err - expected).abs() / expected);
    }
    assert!(
        worst_match <= 1e-9,
        "baseline steady error deviates from closed form by {worst_match}"
    );
    let am_worst = am.step_events[1..]
        .iter()
        .map(|e| e.rel_error)
        .fold(0.0f64, f64::max);
    assert!(am_worst <= DEADBEAT_TOLERANCE, "momentum controller error {am_worst}");
    println!(
        "ACCEPTANCE 7 comparison harness: PASS (zero-noise logs bit-identical; dv = {dv}: baseline error = {expected:.4} matching closed form to {worst_match:.3e}, momentum controller error {am_worst:.3e} <= {:.0e})",
        DEADBEAT_TOLERANCE
    );
}
