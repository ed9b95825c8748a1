use exact_mppi::controller::{
    control_cost, evaluate_rollouts, obstacle_cost, path_integral_update, running_task_cost, softmax_weights, terminal_task_cost,
    Guidance, MppiController, MppiParams, RolloutBatch, RolloutContext,
};
use exact_mppi::geometry::{min_signed_distance_with, transform_to_body, FootprintSpec, ObstacleSet, Point2, Pose2};
use exact_mppi::kinematics::{ControlInput, KinematicLimits, MotionModel};
use proptest::prelude::*;

fn t_shape() -> FootprintSpec {
    FootprintSpec::load(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/footprints/t.json")).unwrap()
}

fn small_params(seed: u64) -> MppiParams {
    MppiParams {
        samples: 48,
        horizon: 12,
        rng_seed: seed,
        control_weights: vec![0.1, 0.05],
        ..Default::default()
    }
}

fn obstacle_points(n: usize) -> impl Strategy<Value = Vec<Point2>> {
    prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0).prop_map(|(x, y)| Point2::new(x, y)), 0..n)
}

/// Costs on a sub-λ-scale grid plus some large values.
fn costs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![0.0f64..50.0, 1e3f64..1e6], 1..200)
}

/// Batch with only costs and flags filled in.
fn flagged_batch(costs: &[f64], flags: &[bool]) -> RolloutBatch {
    RolloutBatch {
        samples: costs.len(),
        horizon: 1,
        dim: 1,
        perturbations: vec![[0.0; 3]; costs.len()],
        controls: vec![[0.0; 3]; costs.len()],
        states: vec![Pose2::default(); 2 * costs.len()],
        d_min: vec![0.0; costs.len()],
        costs: costs.to_vec(),
        unsafe_flags: flags.to_vec(),
    }
}

proptest! {
    #[test]
    fn weights_sum_to_one(costs in costs(), lambda in 0.01f64..1e3) {
        let (w, beta) = softmax_weights(&costs, lambda);
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(w.iter().all(|&v| (0.0..=1.0).contains(&v)));
        prop_assert_eq!(beta, costs.iter().copied().fold(f64::INFINITY, f64::min));
    }

    #[test]
    fn weights_ignore_a_common_offset(costs in costs(), lambda in 0.01f64..1e3, shift in -1e4f64..1e4) {
        let (w, _) = softmax_weights(&costs, lambda);
        let shifted: Vec<f64> = costs.iter().map(|c| c + shift).collect();
        let (ws, _) = softmax_weights(&shifted, lambda);
        for (a, b) in w.iter().zip(&ws) {
            prop_assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn unsafe_rollouts_carry_no_weight(
        rows in prop::collection::vec((0.0f64..1e6, any::<bool>()), 2..300),
        safe_index in any::<prop::sample::Index>(),
        lambda in 1e-3f64..1e3,
    ) {
        let (costs, mut flags): (Vec<f64>, Vec<bool>) = rows.into_iter().unzip();
        flags[safe_index.index(costs.len())] = false;
        let batch = flagged_batch(&costs, &flags);
        let (w, _) = softmax_weights(&batch.augmented_costs(1e9), lambda);
        let unsafe_mass: f64 = w.iter().zip(&flags).filter(|(_, &f)| f).map(|(w, _)| w).sum();
        prop_assert!(unsafe_mass < 1e-6, "unsafe mass {unsafe_mass}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn single_rollout_matches_scalar_loop(
        obstacles in obstacle_points(30),
        nominal in prop::collection::vec((-1.5f64..1.5, -1.0f64..1.0), 12),
        noise in prop::collection::vec((-0.5f64..0.5, -0.5f64..0.5), 12),
        start in (-1.0f64..1.0, -1.0f64..1.0, -3.0f64..3.0),
        prev in (-1.0f64..1.0, -1.0f64..1.0),
    ) {
        let model = MotionModel::Diff;
        let fp = t_shape();
        let limits = KinematicLimits::platform_defaults(&model);
        let params = small_params(0);
        let guidance = Guidance::new(vec![Point2::new(0.0, 0.0), Point2::new(2.0, 1.0), Point2::new(4.0, 0.0)], Pose2::new(4.0, 0.0, 0.5)).unwrap();
        let set = ObstacleSet::from_points(&obstacles, 40);
        let ctx = RolloutContext::new(&model, &fp, &limits, &params, &guidance, &set).unwrap();
        let q0 = Pose2::new(start.0, start.1, start.2);
        let nominal: Vec<ControlInput> = nominal.iter().map(|&(v, w)| ControlInput::from_slice(&[v, w])).collect();
        let raw: Vec<[f64; 3]> = noise.iter().map(|&(a, b)| [a, b, 0.0]).collect();
        let u_prev = ControlInput::from_slice(&[prev.0, prev.1]);
        let batch = evaluate_rollouts(&ctx, &q0, &nominal, &u_prev, &raw).unwrap();

        // Reference: step, move obstacles into the body frame, reduce, charge.
        let weights = params.control_weights_for(&model);
        let (mut q, mut last, mut cost) = (q0, u_prev, 0.0);
        for h in 0..params.horizon {
            let requested = ControlInput::from_slice(&[nominal[h].get(0) + raw[h][0], nominal[h].get(1) + raw[h][1]]);
            let u = limits.clamp_control(&requested, &last, params.dt).unwrap();
            let d = min_signed_distance_with(&fp, &transform_to_body(&set, &q), params.empty_clearance);
            prop_assert!((batch.d_min[h] - d).abs() <= 1e-9);
            cost += running_task_cost(&q, &guidance, &params.task)
                + control_cost(&[u.get(0), u.get(1), 0.0], &weights)
                + obstacle_cost(d, &params);
            if h + 1 == params.horizon {
                cost += terminal_task_cost(&q, &guidance, &params.task);
            }
            q = model.step(&q, &u, params.dt).unwrap();
            let s = batch.states[h + 1];
            prop_assert!((s.x - q.x).abs() <= 1e-9 && (s.y - q.y).abs() <= 1e-9 && (s.theta - q.theta).abs() <= 1e-9);
            last = u;
        }
        prop_assert!((batch.costs[0] - cost).abs() <= 1e-9 * cost.abs().max(1.0), "{} vs {cost}", batch.costs[0]);
        prop_assert_eq!(batch.unsafe_flags[0], batch.d_min.iter().any(|&d| d < params.d_safe));

        // The update with a single rollout moves the nominal by exactly its perturbation.
        let update = path_integral_update(&nominal, &batch, &batch.augmented_costs(params.w_inf), params.lambda);
        prop_assert_eq!(&update.weights, &vec![1.0]);
    }

    #[test]
    fn failed_validation_stops_and_clears_the_nominal(obstacles in obstacle_points(40), seed in 0u64..1000, heading in -3.0f64..3.0) {
        let model = MotionModel::Diff;
        let mut c = MppiController::new(model, t_shape(), KinematicLimits::platform_defaults(&model), small_params(seed)).unwrap();
        c.warm_start(ControlInput::from_slice(&[0.8, 0.2]));
        let guidance = Guidance::straight(Point2::new(0.0, 0.0), Pose2::new(4.0, 0.0, 0.0));
        let set = ObstacleSet::from_points(&obstacles, 64);
        let mut q = Pose2::new(0.0, 0.0, heading);
        for _ in 0..4 {
            let d = c.control_cycle(&q, &set, &guidance).unwrap();
            if !d.validated {
                prop_assert!(d.command.is_zero());
                prop_assert!(c.nominal().iter().all(|u| u.is_zero()));
                prop_assert!(c.last_command().is_zero());
            }
            q = model.step(&q, &d.command, 0.1).unwrap();
        }
    }

    #[test]
    fn cycles_are_deterministic_and_within_limits(obstacles in obstacle_points(30), seed in any::<u64>()) {
        let model = MotionModel::Omni;
        let limits = KinematicLimits::platform_defaults(&model);
        let params = MppiParams { samples: 48, horizon: 12, rng_seed: seed, ..Default::default() };
        let make = || MppiController::new(model, t_shape(), limits.clone(), params.clone()).unwrap();
        let (mut a, mut b) = (make(), make());
        let guidance = Guidance::straight(Point2::new(0.0, 0.0), Pose2::new(4.0, 1.0, 0.0));
        let set = ObstacleSet::from_points(&obstacles, 32);
        let mut q = Pose2::default();
        let mut prev = ControlInput::zeros(3);
        for _ in 0..5 {
            let (da, db) = (a.control_cycle(&q, &set, &guidance).unwrap(), b.control_cycle(&q, &set, &guidance).unwrap());
            prop_assert_eq!(&da, &db);
            prop_assert_eq!(a.nominal(), b.nominal());
            if da.validated {
                prop_assert!(limits.admits(&da.command, &prev, params.dt, 1e-12));
            }
            prev = da.command;
            q = model.step(&q, &da.command, params.dt).unwrap();
        }
    }
}
