//! Closed-loop episodes: sense, plan, execute, advance the world, score.

use std::io::Write;

use serde::Serialize;

use super::obstacle::ground_truth_collision;
use super::scenario::Scenario;
use super::sensor::sense;
use crate::controller::{mix64, Guidance, MppiController};
use crate::error::Result;
use crate::geometry::{min_signed_distance_at_pose, CullBounds, wrap_angle, FootprintSpec, ObstacleSet, Pose2};
use crate::hybrid::{HybridController, ModeSpec};
use crate::kinematics::{ControlInput, MotionModel};

/// Which geometry the planner reasons about. Collision truth always uses the exact footprint.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PlannerFootprint {
    #[default]
    Exact,
    ConvexHull,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunOptions {
    /// Replaces the scenario seed.
    pub seed: Option<u64>,
    pub planner: PlannerFootprint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FailureKind {
    None,
    Collision,
    Timeout,
    Stall,
}

/// One control cycle: the pose it started from and the command executed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub pose: Pose2,
    /// Model-shaped command padded with zeros.
    pub command: [f64; 3],
    /// Planner-view clearance at `pose`.
    pub d_min_planner: f64,
    pub mode: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpisodeResult {
    pub success: bool,
    pub failure_kind: FailureKind,
    pub nav_time: f64,
    pub path_length: f64,
    pub mean_speed: f64,
    /// Smallest planner-view clearance along the run.
    pub min_clearance: f64,
    pub cycles: u64,
    /// Cycles whose nominal failed validation.
    pub safe_stops: u64,
    pub mode_switches: u64,
    pub seed: u64,
    pub planner: PlannerFootprint,
    #[serde(skip)]
    pub trajectory: Vec<TrajectorySample>,
}

impl EpisodeResult {
    /// CSV with columns `t,x,y,theta,u0,u1,u2,d_min_planner,mode`.
    pub fn write_trajectory_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "x", "y", "theta", "u0", "u1", "u2", "d_min_planner", "mode"])
            .map_err(csv_err)?;
        for s in &self.trajectory {
            let mode = s.mode.map(|m| m.to_string()).unwrap_or_default();
            w.write_record([
                format!("{:.3}", s.t),
                format!("{:.9}", s.pose.x),
                format!("{:.9}", s.pose.y),
                format!("{:.9}", s.pose.theta),
                format!("{:.9}", s.command[0]),
                format!("{:.9}", s.command[1]),
                format!("{:.9}", s.command[2]),
                format!("{:.9}", s.d_min_planner),
                mode,
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> crate::error::Error {
    crate::error::Error::Io(std::io::Error::other(e))
}

enum Planner {
    Single(Box<MppiController>),
    Hybrid(Box<HybridController>),
}

struct Step {
    command: ControlInput,
    model: MotionModel,
    mode: Option<usize>,
    validated: bool,
    switched: bool,
}

impl Planner {
    fn cycle(&mut self, q: &Pose2, obstacles: &ObstacleSet, guidance: &Guidance) -> Result<Step> {
        match self {
            Planner::Single(c) => {
                let d = c.control_cycle(q, obstacles, guidance)?;
                Ok(Step {
                    command: d.command,
                    model: *c.model(),
                    mode: None,
                    validated: d.validated,
                    switched: false,
                })
            }
            Planner::Hybrid(h) => {
                let d = h.hybrid_cycle(q, obstacles, guidance)?;
                Ok(Step {
                    command: d.command,
                    model: *h.mode_model(d.mode),
                    mode: Some(d.mode),
                    validated: d.validated,
                    switched: d.switched,
                })
            }
        }
    }
}

fn goal_reached(scenario: &Scenario, q: &Pose2) -> bool {
    let tol = &scenario.goal_tolerance;
    q.position().distance(scenario.goal.position()) <= tol.position && wrap_angle(q.theta - scenario.goal.theta).abs() <= tol.heading
}

/// Runs one closed-loop episode.
pub fn run_episode(scenario: &Scenario, options: &RunOptions) -> Result<EpisodeResult> {
    scenario.validate()?;
    let seed = options.seed.unwrap_or(scenario.seed);
    let planner_fp: FootprintSpec = match options.planner {
        PlannerFootprint::Exact => scenario.footprint.clone(),
        PlannerFootprint::ConvexHull => scenario.footprint.convex_hull(),
    };
    let mut mppi = scenario.mppi.clone();
    mppi.rng_seed = mix64(seed, scenario.mppi.rng_seed);
    let mut planner = match &scenario.hybrid {
        None => Planner::Single(Box::new(MppiController::new(scenario.model, planner_fp.clone(), scenario.limits(), mppi.clone())?)),
        Some(h) => {
            let modes: Vec<ModeSpec> = h.modes.clone();
            Planner::Hybrid(Box::new(HybridController::new(&modes, &planner_fp, &mppi, h.params.clone(), h.initial_mode)?))
        }
    };
    let guidance = scenario.guidance();
    let dt = scenario.mppi.dt;
    let cull = CullBounds::of(&planner_fp);
    let clearance = |q: &Pose2, obs: &ObstacleSet| {
        min_signed_distance_at_pose(&planner_fp, &cull, &obs.valid_points(), q, scenario.mppi.empty_clearance)
    };

    let mut q = scenario.start;
    let mut t = 0.0;
    let mut cycle: u64 = 0;
    let mut trajectory = Vec::new();
    let mut history: Vec<(f64, Pose2)> = vec![(0.0, q)];
    let mut safe_stops = 0;
    let mut switches = 0;
    let mut min_clearance = f64::INFINITY;
    let max_cycles = (scenario.time_limit / dt).ceil() as u64;

    let failure = loop {
        let shapes = scenario.shapes_at(t);
        let obstacles = sense(&shapes, &q, &scenario.sensor, seed, cycle);
        let d_now = clearance(&q, &obstacles);
        min_clearance = min_clearance.min(d_now);
        if goal_reached(scenario, &q) {
            trajectory.push(TrajectorySample {
                t,
                pose: q,
                command: [0.0; 3],
                d_min_planner: d_now,
                mode: None,
            });
            break FailureKind::None;
        }
        if cycle >= max_cycles {
            break FailureKind::Timeout;
        }
        let window_start = history.iter().position(|(ht, _)| *ht >= t - scenario.stall.window - 1e-9);
        if t >= scenario.stall.window - 1e-9 {
            let (_, old) = history[window_start.unwrap_or(0)];
            if old.position().distance(q.position()) < scenario.stall.distance {
                break FailureKind::Stall;
            }
        }
        let step = planner.cycle(&q, &obstacles, &guidance)?;
        if !step.validated {
            safe_stops += 1;
        }
        if step.switched {
            switches += 1;
        }
        let mut command = [0.0; 3];
        command[..step.command.dim()].copy_from_slice(step.command.as_slice());
        trajectory.push(TrajectorySample {
            t,
            pose: q,
            command,
            d_min_planner: d_now,
            mode: step.mode,
        });
        q = step.model.step(&q, &step.command, dt)?;
        cycle += 1;
        t = cycle as f64 * dt;
        history.push((t, q));
        let shapes = scenario.shapes_at(t);
        if ground_truth_collision(&scenario.footprint, &q, &shapes) {
            let d_hit = clearance(&q, &sense(&shapes, &q, &scenario.sensor, seed, cycle));
            min_clearance = min_clearance.min(d_hit);
            trajectory.push(TrajectorySample {
                t,
                pose: q,
                command: [0.0; 3],
                d_min_planner: d_hit,
                mode: step.mode,
            });
            break FailureKind::Collision;
        }
    };

    let path_length: f64 = trajectory.windows(2).map(|w| w[0].pose.position().distance(w[1].pose.position())).sum();
    let nav_time = t;
    Ok(EpisodeResult {
        success: failure == FailureKind::None,
        failure_kind: failure,
        nav_time,
        path_length,
        mean_speed: if nav_time > 0.0 { path_length / nav_time } else { 0.0 },
        min_clearance,
        cycles: cycle,
        safe_stops,
        mode_switches: switches,
        seed,
        planner: options.planner,
        trajectory,
    })
}
