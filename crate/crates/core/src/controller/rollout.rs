//! Batched rollout evaluation, the path-integral update and nominal validation.

use rayon::prelude::*;

use super::cost::{control_cost, obstacle_cost, running_task_cost, terminal_task_cost, Guidance};
use super::params::MppiParams;
use crate::error::{Error, Result};
use crate::geometry::{CullBounds, FootprintSpec, ObstacleSet, Point2, PointGrid, Pose2};
use crate::kinematics::{ControlInput, KinematicLimits, MotionModel};

/// Bucket size of the obstacle index used for clearance queries (m).
const GRID_CELL: f64 = 0.25;

/// Everything a rollout needs besides its control sequence.
#[derive(Debug, Clone)]
pub struct RolloutContext<'a> {
    pub model: &'a MotionModel,
    pub footprint: &'a FootprintSpec,
    pub limits: &'a KinematicLimits,
    pub params: &'a MppiParams,
    pub guidance: &'a Guidance,
    obstacles: Vec<Point2>,
    grid: PointGrid,
    cull: CullBounds,
    control_weights: [f64; 3],
}

impl<'a> RolloutContext<'a> {
    /// `obstacles` are world-frame points; padded entries are dropped.
    pub fn new(
        model: &'a MotionModel,
        footprint: &'a FootprintSpec,
        limits: &'a KinematicLimits,
        params: &'a MppiParams,
        guidance: &'a Guidance,
        obstacles: &ObstacleSet,
    ) -> Result<Self> {
        model.validate()?;
        limits.validate_for(model)?;
        params.validate_for(model)?;
        Ok(Self {
            model,
            footprint,
            limits,
            params,
            guidance,
            grid: PointGrid::new(&obstacles.valid_points(), GRID_CELL),
            obstacles: obstacles.valid_points(),
            cull: CullBounds::of(footprint),
            control_weights: params.control_weights_for(model),
        })
    }

    pub fn obstacles(&self) -> &[Point2] {
        &self.obstacles
    }

    /// Minimum signed distance from the footprint at `q` to the observed points.
    #[inline]
    pub fn clearance(&self, q: &Pose2) -> f64 {
        self.grid.min_signed_distance_at_pose(self.footprint, &self.cull, q, self.params.empty_clearance)
    }

    /// Simulates one control sequence. Step `h` is charged on the pre-step
    /// pose `q_h`; the terminal goal terms are folded into `h = T − 1`.
    /// `raw(h)` yields the requested control, rate-limited against the
    /// previously applied one.
    fn simulate(&self, q0: &Pose2, u_prev: &[f64; 3], mut raw: impl FnMut(usize) -> [f64; 3], out: RolloutRow<'_>) -> (f64, bool) {
        let p = self.params;
        let horizon = out.d_min.len();
        let mut q = *q0;
        let mut prev = *u_prev;
        let mut cost = 0.0;
        let mut unsafe_flag = false;
        out.states[0] = q;
        for h in 0..horizon {
            let u = self.limits.clamp_raw(&raw(h), &prev, p.dt);
            let d = self.clearance(&q);
            unsafe_flag |= d < p.d_safe;
            cost += running_task_cost(&q, self.guidance, &p.task) + control_cost(&u, &self.control_weights) + obstacle_cost(d, p);
            if h + 1 == horizon {
                cost += terminal_task_cost(&q, self.guidance, &p.task);
            }
            out.controls[h] = u;
            out.d_min[h] = d;
            q = self.model.step_raw(&q, &u, p.dt);
            out.states[h + 1] = q;
            prev = u;
        }
        (cost, unsafe_flag)
    }
}

struct RolloutRow<'b> {
    controls: &'b mut [[f64; 3]],
    states: &'b mut [Pose2],
    d_min: &'b mut [f64],
}

/// Results of `samples` rollouts over `horizon` steps, row-major by rollout.
#[derive(Debug, Clone, PartialEq)]
pub struct RolloutBatch {
    pub samples: usize,
    pub horizon: usize,
    pub dim: usize,
    /// Applied minus nominal control, `samples × horizon`.
    pub perturbations: Vec<[f64; 3]>,
    /// Applied (limit-respecting) controls, `samples × horizon`.
    pub controls: Vec<[f64; 3]>,
    /// Visited poses, `samples × (horizon + 1)`.
    pub states: Vec<Pose2>,
    /// Clearance at each pre-step pose, `samples × horizon`.
    pub d_min: Vec<f64>,
    /// Trajectory costs `J`.
    pub costs: Vec<f64>,
    /// Whether any step came closer than `d_safe`.
    pub unsafe_flags: Vec<bool>,
}

impl RolloutBatch {
    pub fn rollout_states(&self, k: usize) -> &[Pose2] {
        let n = self.horizon + 1;
        &self.states[k * n..(k + 1) * n]
    }

    pub fn rollout_controls(&self, k: usize) -> &[[f64; 3]] {
        &self.controls[k * self.horizon..(k + 1) * self.horizon]
    }

    pub fn rollout_d_min(&self, k: usize) -> &[f64] {
        &self.d_min[k * self.horizon..(k + 1) * self.horizon]
    }

    /// `J + w_inf·χ`.
    pub fn augmented_costs(&self, w_inf: f64) -> Vec<f64> {
        self.costs
            .iter()
            .zip(&self.unsafe_flags)
            .map(|(j, &u)| if u { j + w_inf } else { *j })
            .collect()
    }
}

fn check_nominal(ctx: &RolloutContext<'_>, nominal: &[ControlInput], u_prev: &ControlInput) -> Result<()> {
    let dim = ctx.model.control_dim();
    if nominal.is_empty() {
        return Err(Error::InvalidArgument("nominal sequence is empty".into()));
    }
    if let Some(u) = nominal.iter().chain([u_prev]).find(|u| u.dim() != dim) {
        return Err(Error::ControlMismatch {
            model: ctx.model.name(),
            expected: dim,
            got: u.dim(),
        });
    }
    Ok(())
}

/// Rolls out `nominal + noise` for every sample in parallel. `noise` holds
/// `samples × nominal.len()` raw perturbations.
pub fn evaluate_rollouts(
    ctx: &RolloutContext<'_>,
    q0: &Pose2,
    nominal: &[ControlInput],
    u_prev: &ControlInput,
    noise: &[[f64; 3]],
) -> Result<RolloutBatch> {
    check_nominal(ctx, nominal, u_prev)?;
    let horizon = nominal.len();
    if noise.is_empty() || noise.len() % horizon != 0 {
        return Err(Error::InvalidArgument(format!(
            "noise length {} is not a positive multiple of the horizon {horizon}",
            noise.len()
        )));
    }
    let samples = noise.len() / horizon;
    let dim = ctx.model.control_dim();
    let mut batch = RolloutBatch {
        samples,
        horizon,
        dim,
        perturbations: vec![[0.0; 3]; samples * horizon],
        controls: vec![[0.0; 3]; samples * horizon],
        states: vec![Pose2::default(); samples * (horizon + 1)],
        d_min: vec![0.0; samples * horizon],
        costs: vec![0.0; samples],
        unsafe_flags: vec![false; samples],
    };
    batch
        .controls
        .par_chunks_mut(horizon)
        .zip(batch.perturbations.par_chunks_mut(horizon))
        .zip(batch.states.par_chunks_mut(horizon + 1))
        .zip(batch.d_min.par_chunks_mut(horizon))
        .zip(batch.costs.par_iter_mut().zip(batch.unsafe_flags.par_iter_mut()))
        .zip(noise.par_chunks(horizon))
        .for_each(|(((((controls, eps), states), d_min), (cost, flag)), raw_eps)| {
            let row = RolloutRow {
                controls: &mut *controls,
                states,
                d_min,
            };
            let requested = |h: usize| {
                let mut u = nominal[h].c;
                for i in 0..dim {
                    u[i] += raw_eps[h][i];
                }
                u
            };
            let (j, chi) = ctx.simulate(q0, &u_prev.c, requested, row);
            *cost = j;
            *flag = chi;
            for h in 0..horizon {
                for i in 0..dim {
                    eps[h][i] = controls[h][i] - nominal[h].c[i];
                }
            }
        });
    Ok(batch)
}

/// Softmax weights `exp(−(J̃ − β)/λ)` normalized to one, with `β = min J̃`.
/// Returns the weights and `β`.
pub fn softmax_weights(costs: &[f64], lambda: f64) -> (Vec<f64>, f64) {
    let beta = costs.iter().copied().fold(f64::INFINITY, f64::min);
    if !beta.is_finite() {
        let n = costs.len().max(1) as f64;
        return (vec![1.0 / n; costs.len()], beta);
    }
    let mut w: Vec<f64> = costs.iter().map(|&j| (-(j - beta) / lambda).exp()).collect();
    let sum: f64 = w.iter().sum();
    for v in &mut w {
        *v /= sum;
    }
    (w, beta)
}

/// Weighted-perturbation update of the nominal sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct PathIntegralUpdate {
    pub nominal: Vec<ControlInput>,
    pub weights: Vec<f64>,
    pub beta: f64,
}

impl PathIntegralUpdate {
    /// `1 / Σ w²`.
    pub fn effective_samples(&self) -> f64 {
        1.0 / self.weights.iter().map(|w| w * w).sum::<f64>()
    }

    /// Shannon entropy of the weights in nats.
    pub fn weight_entropy(&self) -> f64 {
        -self.weights.iter().filter(|&&w| w > 0.0).map(|w| w * w.ln()).sum::<f64>()
    }
}

/// `u_h ← u_h + Σ_k w_k ε_{k,h}` with `w = softmax(−(J̃ − β)/λ)`.
pub fn path_integral_update(nominal: &[ControlInput], batch: &RolloutBatch, augmented_costs: &[f64], lambda: f64) -> PathIntegralUpdate {
    assert_eq!(augmented_costs.len(), batch.samples, "one cost per rollout");
    assert_eq!(nominal.len(), batch.horizon, "nominal length must match the horizon");
    let (weights, beta) = softmax_weights(augmented_costs, lambda);
    let mut updated = nominal.to_vec();
    for (k, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let eps = &batch.perturbations[k * batch.horizon..(k + 1) * batch.horizon];
        for (u, e) in updated.iter_mut().zip(eps) {
            for i in 0..batch.dim {
                u.c[i] += w * e[i];
            }
        }
    }
    PathIntegralUpdate {
        nominal: updated,
        weights,
        beta,
    }
}

/// Noise-free rollout of a candidate nominal sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct NominalCheck {
    /// True when every step keeps at least `d_safe` clearance.
    pub valid: bool,
    pub states: Vec<Pose2>,
    /// Controls after limit enforcement.
    pub controls: Vec<ControlInput>,
    pub d_min: Vec<f64>,
    pub cost: f64,
}

impl NominalCheck {
    pub fn min_clearance(&self) -> f64 {
        self.d_min.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Rolls out `nominal` from `q0` without noise and checks the clearance of every pose visited.
pub fn validate_nominal(ctx: &RolloutContext<'_>, q0: &Pose2, nominal: &[ControlInput], u_prev: &ControlInput) -> Result<NominalCheck> {
    check_nominal(ctx, nominal, u_prev)?;
    let horizon = nominal.len();
    let dim = ctx.model.control_dim();
    let mut controls = vec![[0.0; 3]; horizon];
    let mut states = vec![Pose2::default(); horizon + 1];
    let mut d_min = vec![0.0; horizon];
    let row = RolloutRow {
        controls: &mut controls,
        states: &mut states,
        d_min: &mut d_min,
    };
    let (cost, unsafe_flag) = ctx.simulate(q0, &u_prev.c, |h| nominal[h].c, row);
    let controls = controls
        .iter()
        .map(|c| ControlInput::from_slice(&c[..dim]))
        .collect();
    Ok(NominalCheck {
        valid: !unsafe_flag,
        states,
        controls,
        d_min,
        cost,
    })
}
