//! Parametric scenario generators.

use serde::{Deserialize, Serialize};

use super::obstacle::Obstacle;
use super::scenario::{GapSpec, GoalTolerance, HybridSpec, Scenario, StallSpec};
use super::sensor::SensorSpec;
use crate::controller::MppiParams;
use crate::error::{Error, Result};
use crate::geometry::{FootprintSpec, Point2, Pose2};
use crate::hybrid::{HybridParams, ModeSpec};
use crate::kinematics::MotionModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorTemplate {
    Corridor,
    Gap,
    Trap,
}

/// Passage width that gives narrowness `don` for `footprint` under `model`.
pub fn gap_width_for_don(footprint: &FootprintSpec, model: &MotionModel, don: f64) -> f64 {
    super::don::effective_width(footprint, model) / don
}

fn check_don(don: f64) -> Result<()> {
    if !(don > 0.0 && don <= 1.2) {
        return Err(Error::InvalidArgument(format!("DoN {don} outside (0, 1.2]")));
    }
    Ok(())
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Obstacle {
    Obstacle::rect(Point2::new(x0, y0), Point2::new(x1, y1))
}

/// Closed rectangular room `[x0, x1] × [y0, y1]` with walls of `thickness` outside it.
fn room(x0: f64, y0: f64, x1: f64, y1: f64, thickness: f64) -> Vec<Obstacle> {
    let t = thickness;
    vec![
        rect(x0 - t, y0 - t, x1 + t, y0),
        rect(x0 - t, y1, x1 + t, y1 + t),
        rect(x0 - t, y0, x0, y1),
        rect(x1, y0, x1 + t, y1),
    ]
}

const WALL: f64 = 0.1;

/// Omnidirectional gap scene: a room split by a thin wall with one opening
/// whose width realises the requested narrowness. The robot starts on one
/// side and must reach the mirror pose on the other.
pub fn gap_scenario(footprint: &FootprintSpec, don: f64) -> Result<Scenario> {
    check_don(don)?;
    let model = MotionModel::Omni;
    let width = gap_width_for_don(footprint, &model, don);
    let half = width / 2.0;
    let (hx, hy) = (4.5, 3.5);
    let mut obstacles = room(-hx, -hy, hx, hy, WALL);
    obstacles.push(rect(-WALL / 2.0, -hy, WALL / 2.0, -half));
    obstacles.push(rect(-WALL / 2.0, half, WALL / 2.0, hy));
    Ok(Scenario {
        name: format!("gap-don-{don:.2}"),
        footprint: footprint.clone(),
        model,
        limits: None,
        mppi: MppiParams {
            samples: 256,
            horizon: 30,
            sigma: vec![0.4, 0.3, 0.8],
            lambda: 1.0,
            ..Default::default()
        },
        hybrid: None,
        obstacles,
        start: Pose2::new(-3.0, 0.0, 0.0),
        goal: Pose2::new(3.0, 0.0, 0.0),
        goal_tolerance: GoalTolerance::default(),
        guidance: vec![],
        sensor: SensorSpec {
            range: 3.0,
            budget: 300,
            ..Default::default()
        },
        time_limit: 60.0,
        seed: 0,
        gap: Some(GapSpec {
            a: Point2::new(0.0, -half),
            b: Point2::new(0.0, half),
        }),
        stall: StallSpec::default(),
    })
}

/// Lateral offset between the two staggered corridor posts along the corridor axis.
const POST_STAGGER: f64 = 0.8;

/// Differential-drive corridor with two staggered posts, one from each wall.
/// The passage width is the lateral distance between the post tips, so a
/// footprint whose narrow rear section can tuck around the first post while
/// its front clears the second fits at higher narrowness than its hull.
pub fn corridor_scenario(footprint: &FootprintSpec, don: f64) -> Result<Scenario> {
    check_don(don)?;
    let model = MotionModel::Diff;
    let width = gap_width_for_don(footprint, &model, don);
    let half = width / 2.0;
    let corridor = (half + 0.3).max(1.3);
    let (x0, x1) = (-5.0, 5.0);
    let mut obstacles = room(x0, -corridor, x1, corridor, WALL);
    let post = WALL / 2.0;
    obstacles.push(rect(-post, -corridor, post, -half));
    obstacles.push(rect(POST_STAGGER - post, half, POST_STAGGER + post, corridor));
    Ok(Scenario {
        name: format!("corridor-don-{don:.2}"),
        footprint: footprint.clone(),
        model,
        limits: None,
        mppi: MppiParams {
            samples: 512,
            horizon: 40,
            sigma: vec![0.6, 1.0],
            ..Default::default()
        },
        hybrid: None,
        obstacles,
        start: Pose2::new(-3.5, 0.0, 0.0),
        goal: Pose2::new(3.5, 0.0, 0.0),
        goal_tolerance: GoalTolerance::default(),
        guidance: vec![],
        sensor: SensorSpec {
            range: 3.0,
            budget: 300,
            ..Default::default()
        },
        time_limit: 60.0,
        seed: 0,
        gap: Some(GapSpec {
            a: Point2::new(0.0, -half),
            b: Point2::new(POST_STAGGER, half),
        }),
        stall: StallSpec::default(),
    })
}

/// Start clearance between the trapped robot and the surrounding walls (m).
const TRAP_CLEARANCE: f64 = 0.12;

/// Highest body-frame `y` of the footprint over the half-plane `x ≤ x_max`.
fn max_y_left_of(footprint: &FootprintSpec, x_max: f64) -> Option<f64> {
    let mut best: Option<f64> = None;
    for outline in footprint.outlines() {
        for i in 0..outline.len() {
            let (a, b) = (outline[i], outline[(i + 1) % outline.len()]);
            let mut consider = |y: f64| best = Some(best.map_or(y, |v: f64| v.max(y)));
            for p in [a, b] {
                if p.x <= x_max {
                    consider(p.y);
                }
            }
            if (a.x - x_max) * (b.x - x_max) < 0.0 {
                consider(a.y + (b.y - a.y) * (x_max - a.x) / (b.x - a.x));
            }
        }
    }
    best
}

/// Hybrid-mode trap: the robot starts in a slot between a front wall and a
/// rear wall whose upper part reaches into the space above the footprint's
/// rear section. Forward and backward travel and in-place rotation are
/// blocked; the only way out is a sideways translation, after which the goal
/// is reached by driving forward. The declared passage is the slot's span at
/// the level of the overhang, measured along the body axis.
pub fn trap_scenario(footprint: &FootprintSpec, don: f64) -> Result<Scenario> {
    check_don(don)?;
    let ackermann = MotionModel::Ackermann { wheelbase: 0.8 };
    let width = gap_width_for_don(footprint, &MotionModel::Parallel, don);
    let support = footprint.support_points();
    let front = support.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    let rear = support.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let top = support.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    let bottom = support.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);

    let (room_x0, room_x1, room_y0, room_y1) = (rear - 2.5, front + 4.0, bottom - 3.5, top + 2.0);
    let front_face = front + TRAP_CLEARANCE + 0.03;
    let overhang_face = front_face - width;
    let rear_face = overhang_face.min(rear - TRAP_CLEARANCE);
    let slot_bottom = bottom - 0.4;
    let mut obstacles = room(room_x0, room_y0, room_x1, room_y1, WALL);
    obstacles.push(rect(front_face, slot_bottom, room_x1, room_y1));
    obstacles.push(rect(room_x0, slot_bottom, rear_face, room_y1));
    let overhang_y = if overhang_face > rear_face {
        let floor = max_y_left_of(footprint, overhang_face).unwrap_or(bottom) + TRAP_CLEARANCE;
        if floor >= room_y1 {
            return Err(Error::InvalidArgument(format!("DoN {don} leaves no room for the trap overhang")));
        }
        obstacles.push(rect(rear_face, floor, overhang_face, room_y1));
        floor
    } else {
        top
    };
    let exit_y = slot_bottom - (top - bottom) / 2.0 - 0.6;
    let goal = Pose2::new(front_face + 2.0, exit_y, 0.0);
    Ok(Scenario {
        name: format!("trap-don-{don:.2}"),
        footprint: footprint.clone(),
        model: ackermann,
        limits: None,
        mppi: MppiParams {
            samples: 256,
            horizon: 30,
            ..Default::default()
        },
        hybrid: Some(HybridSpec {
            params: HybridParams::default(),
            modes: vec![
                ModeSpec {
                    model: ackermann,
                    limits: None,
                },
                ModeSpec {
                    model: MotionModel::Parallel,
                    limits: None,
                },
                ModeSpec {
                    model: MotionModel::Spin,
                    limits: None,
                },
            ],
            initial_mode: 1,
        }),
        obstacles,
        start: Pose2::new(0.0, 0.0, 0.0),
        goal,
        goal_tolerance: GoalTolerance::default(),
        guidance: vec![Point2::new(0.0, 0.0), Point2::new(0.0, exit_y), goal.position()],
        sensor: SensorSpec {
            range: 3.0,
            budget: 300,
            ..Default::default()
        },
        time_limit: 60.0,
        seed: 0,
        gap: Some(GapSpec {
            a: Point2::new(front_face, overhang_y),
            b: Point2::new(overhang_face, overhang_y),
        }),
        stall: StallSpec::default(),
    })
}

/// Keeps only the listed hybrid modes (declaration order preserved); the
/// initial mode falls back to the first kept one when it is dropped.
pub fn restrict_modes(scenario: &Scenario, keep: &[usize]) -> Result<Scenario> {
    let mut out = scenario.clone();
    let h = out
        .hybrid
        .as_mut()
        .ok_or_else(|| Error::scenario("/hybrid", "scenario has no hybrid modes"))?;
    if keep.is_empty() || keep.iter().any(|&k| k >= h.modes.len()) {
        return Err(Error::InvalidArgument(format!("mode selection {keep:?} out of range")));
    }
    let initial = keep.iter().position(|&k| k == h.initial_mode).unwrap_or(0);
    h.modes = keep.iter().map(|&k| h.modes[k].clone()).collect();
    h.initial_mode = initial;
    out.model = h.modes[initial].model;
    Ok(out)
}

impl GeneratorTemplate {
    /// World-frame direction in which the declared passage is traversed.
    pub fn travel_direction(self) -> Point2 {
        match self {
            GeneratorTemplate::Corridor | GeneratorTemplate::Gap => Point2::new(1.0, 0.0),
            GeneratorTemplate::Trap => Point2::new(0.0, -1.0),
        }
    }

    pub fn generate(self, footprint: &FootprintSpec, don: f64) -> Result<Scenario> {
        match self {
            GeneratorTemplate::Corridor => corridor_scenario(footprint, don),
            GeneratorTemplate::Gap => gap_scenario(footprint, don),
            GeneratorTemplate::Trap => trap_scenario(footprint, don),
        }
    }
}
