//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Pass criterion numbers (e.g. `-- 3 8`) to run a subset.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use exact_mppi::controller::{
    control_cost, evaluate_rollouts, obstacle_cost, running_task_cost, softmax_weights, terminal_task_cost, Guidance, MppiController,
    MppiParams, RolloutBatch, RolloutContext,
};
use exact_mppi::geometry::{
    min_signed_distance_with, sd_polygon, transform_to_body, FootprintShape, FootprintSpec, ObstacleSet, Point2,
    Pose2,
};
use exact_mppi::kinematics::{ControlInput, KinematicLimits, MotionModel};
use exact_mppi::world::{restrict_modes, run_episode, EpisodeResult, GeneratorTemplate, PlannerFootprint, RunOptions, Scenario};
use exact_mppi_bench::{load_footprints, oracle_sd_polygon, query_batch, scaling_benchmark, winding_number, EvaluatorKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Criterion 1
const ORACLE_QUERIES: usize = 10_000;
const ORACLE_SAMPLES_PER_EDGE: usize = 1_000;
const ORACLE_TOLERANCE: f64 = 1e-3;
const ORACLE_RUNTIME_S: f64 = 60.0;
// Criterion 2
const COVER_QUERIES: usize = 10_000;
const COVER_TOLERANCE: f64 = 1e-9;
// Criterion 3
const SCALING_COUNTS: [usize; 5] = [100, 1_000, 10_000, 100_000, 1_000_000];
const SCALING_TRIALS: usize = 10;
const SLOPE_RANGE: (f64, f64) = (0.75, 1.25);
const COVER_SPEEDUP_AT: usize = 100_000;
const COVER_MIN_SPEEDUP: f64 = 1.5;
// Criteria 4, 5, 7
const TRIALS: u64 = 10;
const GAP_RUNTIME_S: f64 = 600.0;
const ABLATION_SLOWDOWN: f64 = 1.2;
// Criterion 6
const PROPERTY_RUNTIME_S: f64 = 30.0;
const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;
const SHIFT_TOLERANCE: f64 = 1e-9;
const UNSAFE_MASS_LIMIT: f64 = 1e-6;
const BATCH_SCALAR_TOLERANCE: f64 = 1e-9;
// Criterion 9
const ARC_TOLERANCE: f64 = 0.02;
const EQUIVARIANCE_TOLERANCE: f64 = 1e-9;

type Check = fn() -> Result<String, String>;

fn main() {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-') && a.parse::<u32>().is_err()).collect();
    let criteria: [(u32, &str, Check); 9] = [
        (1, "sdf exactness vs oracle", sdf_exactness),
        (2, "rect/polygon agreement", rect_polygon_agreement),
        (3, "evaluator performance shape", evaluator_performance),
        (4, "omni gap footprint fidelity", gap_fidelity),
        (5, "corridor DoN sweep", corridor_sweep),
        (6, "MPPI unit properties", mppi_properties),
        (7, "hybrid ablation", hybrid_ablation),
        (8, "end-to-end determinism", determinism),
        (9, "kinematics", kinematics),
    ];
    // A plain name filter from `cargo test <filter>` that does not mention this suite runs nothing.
    if !filters.is_empty() && !filters.iter().any(|f| "acceptance".contains(f.as_str())) {
        return;
    }
    let mut failed = 0;
    for (id, name, check) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id} [{name}]: PASS ({detail}; {secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id} [{name}]: FAIL ({detail}; {secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn ensure(ok: bool, detail: String) -> Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn footprint(file: &str) -> FootprintSpec {
    FootprintSpec::load(root().join("fixtures/footprints").join(file)).unwrap()
}

fn polygon_of(fp: &FootprintSpec) -> &exact_mppi::geometry::PolygonFootprint {
    match fp.shape() {
        FootprintShape::Polygon(p) => p,
        FootprintShape::Rectangles(_) => panic!("{} is not a polygon", fp.name()),
    }
}

const GALLERY: [&str; 7] = ["l.json", "t.json", "f.json", "star.json", "arrow.json", "diamond.json", "trapezoid.json"];

fn sdf_exactness() -> Result<String, String> {
    let start = Instant::now();
    let queries = query_batch(2024, ORACLE_QUERIES);
    let (mut worst, mut sign_errors) = (0.0f64, 0);
    for file in GALLERY {
        let fp = footprint(file);
        let poly = polygon_of(&fp);
        for &q in &queries {
            let sd = sd_polygon(q, poly);
            let oracle = oracle_sd_polygon(q, poly.vertices(), ORACLE_SAMPLES_PER_EDGE);
            worst = worst.max((sd - oracle).abs());
            if sd.abs() > ORACLE_TOLERANCE && (sd < 0.0) != (winding_number(q, poly.vertices()) != 0) {
                sign_errors += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(
        worst <= ORACLE_TOLERANCE && sign_errors == 0 && secs < ORACLE_RUNTIME_S,
        format!("7 shapes x {ORACLE_QUERIES} queries: max |sd - oracle| = {worst:.2e} m, sign disagreements = {sign_errors}, {secs:.1}s"),
    )
}

fn rect_polygon_agreement() -> Result<String, String> {
    let (mut worst, mut exterior, mut sign_errors) = (0.0f64, 0, 0);
    for name in ["l", "t", "f"] {
        let poly = footprint(&format!("{name}.json"));
        let cover = footprint(&format!("{name}_rects.json"));
        // The full 50 m square plus a batch concentrated around the shape.
        let wide = query_batch(7, COVER_QUERIES);
        let near: Vec<Point2> = query_batch(8, COVER_QUERIES).iter().map(|&q| q * 0.06).collect();
        for q in wide.into_iter().chain(near) {
            let (a, b) = (poly.signed_distance(q), cover.signed_distance(q));
            if b > 0.0 {
                exterior += 1;
                worst = worst.max((a - b).abs());
            }
            if a.abs() > COVER_TOLERANCE && b.abs() > COVER_TOLERANCE && (a < 0.0) != (b < 0.0) {
                sign_errors += 1;
            }
        }
    }
    ensure(
        worst <= COVER_TOLERANCE && sign_errors == 0,
        format!("L/T/F: {exterior} exterior queries, max |diff| = {worst:.2e} m, sign disagreements = {sign_errors}"),
    )
}

fn evaluator_performance() -> Result<String, String> {
    let footprints: Vec<_> = load_footprints(root().join("fixtures/footprints"))
        .unwrap()
        .into_iter()
        .filter(|f| f.cover.is_some())
        .collect();
    let report = scaling_benchmark(&footprints, &SCALING_COUNTS, SCALING_TRIALS, 1, 0).unwrap();
    let median = |fp: &str, kind, n| report.find(fp, kind, n, 1).unwrap().median_us;
    let (top, mid) = (SCALING_COUNTS[4], SCALING_COUNTS[2]);
    let decades = ((top as f64) / (mid as f64)).log10();
    let mut ok = true;
    let mut parts = Vec::new();
    for fp in &footprints {
        let mut slopes = Vec::new();
        for kind in EvaluatorKind::ALL {
            let slope = (median(&fp.name, kind, top) / median(&fp.name, kind, mid)).log10() / decades;
            ok &= (SLOPE_RANGE.0..=SLOPE_RANGE.1).contains(&slope);
            slopes.push(slope);
        }
        let speedup =
            median(&fp.name, EvaluatorKind::PolygonEdge, COVER_SPEEDUP_AT) / median(&fp.name, EvaluatorKind::RectCover, COVER_SPEEDUP_AT);
        ok &= speedup >= COVER_MIN_SPEEDUP;
        parts.push(format!(
            "{}: slope poly {:.2} rect {:.2}, rect speedup {speedup:.2}x",
            fp.name, slopes[0], slopes[1]
        ));
    }
    ensure(ok, parts.join("; "))
}

fn trials(scenario: &Scenario, planner: PlannerFootprint) -> Vec<EpisodeResult> {
    (0..TRIALS)
        .map(|seed| run_episode(scenario, &RunOptions { seed: Some(seed), planner }).unwrap())
        .collect()
}

fn successes(results: &[EpisodeResult]) -> usize {
    results.iter().filter(|r| r.success).count()
}

fn gap_fidelity() -> Result<String, String> {
    let start = Instant::now();
    let l = footprint("l.json");
    let mut counts = Vec::new();
    for don in [1.05, 0.83] {
        let s = GeneratorTemplate::Gap.generate(&l, don).unwrap();
        counts.push((
            don,
            successes(&trials(&s, PlannerFootprint::Exact)),
            successes(&trials(&s, PlannerFootprint::ConvexHull)),
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    let [(_, e105, h105), (_, e083, h083)] = [counts[0], counts[1]];
    ensure(
        e105 >= 8 && h105 == 0 && e083 >= 9 && h083 >= 9 && secs < GAP_RUNTIME_S,
        format!("DoN 1.05 exact {e105}/10 hull {h105}/10; DoN 0.83 exact {e083}/10 hull {h083}/10; {secs:.0}s"),
    )
}

fn corridor_sweep() -> Result<String, String> {
    let t = footprint("t.json");
    let mut ok = true;
    let mut parts = Vec::new();
    for don in [0.6, 0.8, 1.0] {
        let s = GeneratorTemplate::Corridor.generate(&t, don).unwrap();
        let exact = successes(&trials(&s, PlannerFootprint::Exact)) as f64 / TRIALS as f64;
        let hull = successes(&trials(&s, PlannerFootprint::ConvexHull)) as f64 / TRIALS as f64;
        ok &= exact >= 0.8;
        ok &= if don < 1.0 { hull >= 0.8 } else { hull == 0.0 };
        parts.push(format!("DoN {don}: exact {exact:.1} hull {hull:.1}"));
    }
    ensure(ok, parts.join("; "))
}

fn hybrid_ablation() -> Result<String, String> {
    let hybrid = GeneratorTemplate::Trap.generate(&footprint("t.json"), 1.0).unwrap();
    let ackermann = hybrid.hybrid.as_ref().unwrap().modes.iter().position(|m| matches!(m.model, MotionModel::Ackermann { .. }));
    let ablation = restrict_modes(&hybrid, &[ackermann.unwrap()]).unwrap();
    let with_modes = trials(&hybrid, PlannerFootprint::Exact);
    let without = trials(&ablation, PlannerFootprint::Exact);
    let mut times: Vec<f64> = with_modes.iter().filter(|r| r.success).map(|r| r.nav_time).collect();
    times.sort_by(f64::total_cmp);
    let median = if times.is_empty() { f64::NAN } else { times[times.len() / 2] };
    let slow_or_failed = without.iter().all(|r| !r.success || r.nav_time >= ABLATION_SLOWDOWN * median);
    ensure(
        times.len() >= 8 && slow_or_failed,
        format!(
            "hybrid {}/10 (median {median:.1}s); ackermann-only {}/10, all failed or >= {ABLATION_SLOWDOWN}x slower: {slow_or_failed}",
            times.len(),
            successes(&without)
        ),
    )
}

fn determinism() -> Result<String, String> {
    let dir = root().join("fixtures/scenarios");
    let mut fixtures: Vec<PathBuf> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    fixtures.retain(|p| p.extension().is_some_and(|e| e == "json"));
    fixtures.sort();
    let scratch = std::env::temp_dir().join(format!("exact-mppi-acceptance-{}", std::process::id()));
    let mut mismatches = Vec::new();
    for path in &fixtures {
        let run = |tag: &str| {
            let out = scratch.join(format!("{}-{tag}", path.file_stem().unwrap().to_string_lossy()));
            let status = Command::new(env!("CARGO_BIN_EXE_exact-mppi"))
                .args(["run", path.to_str().unwrap(), "--seed", "11", "--out", out.to_str().unwrap()])
                .output()
                .unwrap()
                .status;
            assert!(matches!(status.code(), Some(0 | 2)), "{}: exit {status}", path.display());
            (std::fs::read(out.join("trajectory.csv")).unwrap(), std::fs::read(out.join("result.json")).unwrap())
        };
        if run("a") != run("b") {
            mismatches.push(path.file_name().unwrap().to_string_lossy().into_owned());
        }
    }
    let _ = std::fs::remove_dir_all(&scratch);
    ensure(
        mismatches.is_empty() && !fixtures.is_empty(),
        format!("{} fixtures run twice with --seed 11, differing: {mismatches:?}", fixtures.len()),
    )
}

fn t_params(seed: u64) -> MppiParams {
    MppiParams {
        samples: 48,
        horizon: 12,
        rng_seed: seed,
        control_weights: vec![0.1, 0.05],
        ..Default::default()
    }
}

fn random_points(rng: &mut ChaCha8Rng, max: usize, span: f64) -> Vec<Point2> {
    let n = rng.random_range(0..=max);
    (0..n)
        .map(|_| Point2::new(rng.random_range(-span..span), rng.random_range(-span..span)))
        .collect()
}

fn mppi_properties() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut sum_err, mut shift_err, mut unsafe_mass) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..2_000 {
        let n = rng.random_range(1..300);
        let costs: Vec<f64> = (0..n)
            .map(|_| if rng.random_bool(0.8) { rng.random_range(0.0..50.0) } else { rng.random_range(1e3..1e6) })
            .collect();
        let lambda = rng.random_range(1e-3..1e3);
        let (w, _) = softmax_weights(&costs, lambda);
        sum_err = sum_err.max((w.iter().sum::<f64>() - 1.0).abs());
        let shift = rng.random_range(-1e4..1e4);
        let (ws, _) = softmax_weights(&costs.iter().map(|c| c + shift).collect::<Vec<_>>(), lambda);
        shift_err = shift_err.max(w.iter().zip(&ws).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));

        let mut flags: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        flags[rng.random_range(0..n)] = false;
        let batch = RolloutBatch {
            samples: n,
            horizon: 1,
            dim: 1,
            perturbations: vec![[0.0; 3]; n],
            controls: vec![[0.0; 3]; n],
            states: vec![Pose2::default(); 2 * n],
            d_min: vec![0.0; n],
            costs: costs.clone(),
            unsafe_flags: flags.clone(),
        };
        let (w, _) = softmax_weights(&batch.augmented_costs(1e9), lambda);
        unsafe_mass = unsafe_mass.max(w.iter().zip(&flags).filter(|(_, &f)| f).map(|(w, _)| w).sum());
    }

    // K = 1 against a scalar reference loop.
    let model = MotionModel::Diff;
    let fp = footprint("t.json");
    let limits = KinematicLimits::platform_defaults(&model);
    let params = t_params(0);
    let guidance = Guidance::new(vec![Point2::new(0.0, 0.0), Point2::new(2.0, 1.0), Point2::new(4.0, 0.0)], Pose2::new(4.0, 0.0, 0.5)).unwrap();
    let weights = params.control_weights_for(&model);
    let mut batch_err = 0.0f64;
    for _ in 0..300 {
        let set = ObstacleSet::from_points(&random_points(&mut rng, 30, 3.0), 40);
        let ctx = RolloutContext::new(&model, &fp, &limits, &params, &guidance, &set).unwrap();
        let q0 = Pose2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-3.0..3.0));
        let nominal: Vec<ControlInput> = (0..params.horizon)
            .map(|_| ControlInput::from_slice(&[rng.random_range(-1.5..1.5), rng.random_range(-1.0..1.0)]))
            .collect();
        let noise: Vec<[f64; 3]> = (0..params.horizon).map(|_| [rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5), 0.0]).collect();
        let u_prev = ControlInput::from_slice(&[rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
        let batch = evaluate_rollouts(&ctx, &q0, &nominal, &u_prev, &noise).unwrap();
        let (mut q, mut last, mut cost) = (q0, u_prev, 0.0);
        for h in 0..params.horizon {
            let requested = ControlInput::from_slice(&[nominal[h].get(0) + noise[h][0], nominal[h].get(1) + noise[h][1]]);
            let u = limits.clamp_control(&requested, &last, params.dt).unwrap();
            let d = min_signed_distance_with(&fp, &transform_to_body(&set, &q), params.empty_clearance);
            batch_err = batch_err.max((batch.d_min[h] - d).abs());
            cost += running_task_cost(&q, &guidance, &params.task) + control_cost(&[u.get(0), u.get(1), 0.0], &weights) + obstacle_cost(d, &params);
            if h + 1 == params.horizon {
                cost += terminal_task_cost(&q, &guidance, &params.task);
            }
            q = model.step(&q, &u, params.dt).unwrap();
            let s = batch.states[h + 1];
            batch_err = batch_err.max((s.x - q.x).abs()).max((s.y - q.y).abs()).max((s.theta - q.theta).abs());
            last = u;
        }
        batch_err = batch_err.max((batch.costs[0] - cost).abs() / cost.abs().max(1.0));
    }

    // Safe stops and determinism over short closed loops.
    let (mut holds, mut bad_holds, mut nondeterministic) = (0, 0, 0);
    let straight = Guidance::straight(Point2::new(0.0, 0.0), Pose2::new(4.0, 0.0, 0.0));
    for case in 0..60u64 {
        let set = ObstacleSet::from_points(&random_points(&mut rng, 40, 3.0), 64);
        let make = || {
            let mut c = MppiController::new(model, fp.clone(), limits.clone(), t_params(case)).unwrap();
            c.warm_start(ControlInput::from_slice(&[0.8, 0.2]));
            c
        };
        let (mut a, mut b) = (make(), make());
        let mut q = Pose2::new(0.0, 0.0, rng.random_range(-3.0..3.0));
        for _ in 0..4 {
            let (da, db) = (a.control_cycle(&q, &set, &straight).unwrap(), b.control_cycle(&q, &set, &straight).unwrap());
            if da != db || a.nominal() != b.nominal() {
                nondeterministic += 1;
            }
            if !da.validated {
                holds += 1;
                if !da.command.is_zero() || !a.nominal().iter().all(|u| u.is_zero()) {
                    bad_holds += 1;
                }
            }
            q = model.step(&q, &da.command, params.dt).unwrap();
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(
        sum_err <= WEIGHT_SUM_TOLERANCE
            && shift_err <= SHIFT_TOLERANCE
            && unsafe_mass < UNSAFE_MASS_LIMIT
            && batch_err <= BATCH_SCALAR_TOLERANCE
            && holds > 0
            && bad_holds == 0
            && nondeterministic == 0
            && secs < PROPERTY_RUNTIME_S,
        format!(
            "|sum w - 1| {sum_err:.1e}, shift {shift_err:.1e}, unsafe mass {unsafe_mass:.1e}, K=1 vs scalar {batch_err:.1e}, \
             {holds} holds ({bad_holds} unsound), {nondeterministic} nondeterministic cycles, {secs:.1}s"
        ),
    )
}

fn kinematics() -> Result<String, String> {
    let us = vec![ControlInput::from_slice(&[1.0, 1.0]); 100];
    let end = *MotionModel::Diff.rollout(&Pose2::default(), &us, 0.01).unwrap().last().unwrap();
    let arc_err = (end.x - 1f64.sin()).hypot(end.y - (1.0 - 1f64.cos()));

    let models = [
        MotionModel::Diff,
        MotionModel::Ackermann { wheelbase: 0.8 },
        MotionModel::Omni,
        MotionModel::Spin,
        MotionModel::Parallel,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for model in models {
        for _ in 0..500 {
            let controls: Vec<ControlInput> = (0..rng.random_range(1..40))
                .map(|_| ControlInput::from_slice(&(0..model.control_dim()).map(|_| rng.random_range(-1.5..1.5)).collect::<Vec<_>>()))
                .collect();
            let mut pose = || Pose2::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0), rng.random_range(-4.0..4.0));
            let (q0, g) = (pose(), pose());
            let plain = model.rollout(&q0, &controls, 0.1).unwrap();
            let moved = model.rollout(&g.compose(&q0), &controls, 0.1).unwrap();
            for (a, b) in plain.iter().zip(&moved) {
                let a = g.compose(a);
                let dth = exact_mppi::geometry::wrap_angle(a.theta - b.theta).abs();
                worst = worst.max((a.x - b.x).abs()).max((a.y - b.y).abs()).max(dth);
            }
        }
    }
    ensure(
        arc_err <= ARC_TOLERANCE && worst <= EQUIVARIANCE_TOLERANCE,
        format!("Euler arc error {arc_err:.4} m at dt 0.01; worst equivariance error over 5 models {worst:.1e}"),
    )
}
