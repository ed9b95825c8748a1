//! Sampling-based MPPI controller with exact footprint clearance, a hard
//! unsafe-rollout penalty and a validated nominal with safe-stop fallback.

mod cost;
mod params;
mod rollout;
mod sampling;

pub use cost::{control_cost, obstacle_cost, running_task_cost, task_cost, terminal_task_cost, Guidance, PathProjection};
pub use params::{MppiParams, TaskWeights, DEFAULT_SIGMA};
pub use rollout::{
    evaluate_rollouts, path_integral_update, softmax_weights, validate_nominal, NominalCheck, PathIntegralUpdate,
    RolloutBatch, RolloutContext,
};
pub use sampling::NoiseSampler;
pub use sampling::mix64;

use serde::Serialize;

use crate::error::Result;
use crate::geometry::{FootprintSpec, ObstacleSet, Pose2};
use crate::kinematics::{ControlInput, KinematicLimits, MotionModel};

/// Per-cycle summary, serializable as one JSON line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleDiagnostics {
    pub cycle: u64,
    /// Minimum augmented rollout cost.
    pub beta: f64,
    pub effective_samples: f64,
    pub weight_entropy: f64,
    /// Fraction of rollouts that came closer than `d_safe`.
    pub unsafe_fraction: f64,
    pub validated: bool,
    /// Smallest clearance along the updated nominal rollout.
    pub nominal_min_clearance: f64,
    pub nominal_cost: f64,
}

impl CycleDiagnostics {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("diagnostics serialize")
    }
}

/// Outcome of one planning cycle before it is committed.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclePlan {
    /// Command to apply now: the first nominal control, or zero after a failed validation.
    pub command: ControlInput,
    pub validated: bool,
    /// Noise-free rollout of the updated nominal.
    pub check: NominalCheck,
    /// Warm start for the next cycle.
    pub next_nominal: Vec<ControlInput>,
    pub diagnostics: CycleDiagnostics,
}

/// Decision returned by [`MppiController::control_cycle`].
pub type ControlDecision = CyclePlan;

/// Stateful single-model MPPI controller.
#[derive(Debug, Clone)]
pub struct MppiController {
    model: MotionModel,
    footprint: FootprintSpec,
    limits: KinematicLimits,
    params: MppiParams,
    sampler: NoiseSampler,
    nominal: Vec<ControlInput>,
    last_command: ControlInput,
    cycle: u64,
}

impl MppiController {
    pub fn new(model: MotionModel, footprint: FootprintSpec, limits: KinematicLimits, params: MppiParams) -> Result<Self> {
        model.validate()?;
        limits.validate_for(&model)?;
        params.validate_for(&model)?;
        let dim = model.control_dim();
        Ok(Self {
            sampler: NoiseSampler::new(params.rng_seed),
            nominal: vec![ControlInput::zeros(dim); params.horizon],
            last_command: ControlInput::zeros(dim),
            cycle: 0,
            model,
            footprint,
            limits,
            params,
        })
    }

    pub fn model(&self) -> &MotionModel {
        &self.model
    }

    pub fn footprint(&self) -> &FootprintSpec {
        &self.footprint
    }

    pub fn limits(&self) -> &KinematicLimits {
        &self.limits
    }

    pub fn params(&self) -> &MppiParams {
        &self.params
    }

    pub fn nominal(&self) -> &[ControlInput] {
        &self.nominal
    }

    pub fn last_command(&self) -> ControlInput {
        self.last_command
    }

    pub fn cycle_index(&self) -> u64 {
        self.cycle
    }

    /// Overrides the control the next cycle is rate-limited against.
    pub fn set_last_command(&mut self, u: ControlInput) {
        assert_eq!(u.dim(), self.model.control_dim(), "command dimension");
        self.last_command = u;
    }

    /// Replaces the nominal with `u` repeated over the horizon.
    pub fn warm_start(&mut self, u: ControlInput) {
        assert_eq!(u.dim(), self.model.control_dim(), "warm-start dimension");
        self.nominal = vec![u; self.params.horizon];
    }

    /// Zero nominal and zero previous command.
    pub fn reset(&mut self) {
        let dim = self.model.control_dim();
        self.nominal = vec![ControlInput::zeros(dim); self.params.horizon];
        self.last_command = ControlInput::zeros(dim);
    }

    /// Runs sampling, the weighted update and validation from `q0` against
    /// `u_prev`, without changing any state.
    pub fn plan(&self, q0: &Pose2, obstacles: &ObstacleSet, guidance: &Guidance, u_prev: &ControlInput) -> Result<CyclePlan> {
        let p = &self.params;
        let ctx = RolloutContext::new(&self.model, &self.footprint, &self.limits, p, guidance, obstacles)?;
        let dim = self.model.control_dim();
        let noise = self
            .sampler
            .sample(self.cycle, p.samples, p.horizon, dim, &p.sigma_for(&self.model));
        let batch = evaluate_rollouts(&ctx, q0, &self.nominal, u_prev, &noise)?;
        let update = path_integral_update(&self.nominal, &batch, &batch.augmented_costs(p.w_inf), p.lambda);
        let check = validate_nominal(&ctx, q0, &update.nominal, u_prev)?;
        let (command, next_nominal) = if check.valid {
            let mut next = check.controls[1..].to_vec();
            next.push(*check.controls.last().unwrap());
            (check.controls[0], next)
        } else {
            (ControlInput::zeros(dim), vec![ControlInput::zeros(dim); p.horizon])
        };
        let unsafe_count = batch.unsafe_flags.iter().filter(|&&u| u).count();
        let diagnostics = CycleDiagnostics {
            cycle: self.cycle,
            beta: update.beta,
            effective_samples: update.effective_samples(),
            weight_entropy: update.weight_entropy(),
            unsafe_fraction: unsafe_count as f64 / batch.samples as f64,
            validated: check.valid,
            nominal_min_clearance: check.min_clearance(),
            nominal_cost: check.cost,
        };
        Ok(CyclePlan {
            command,
            validated: check.valid,
            check,
            next_nominal,
            diagnostics,
        })
    }

    /// Adopts a plan's warm start and command, and advances the cycle counter.
    pub fn commit(&mut self, plan: &CyclePlan) {
        self.nominal.clone_from(&plan.next_nominal);
        self.last_command = plan.command;
        self.cycle += 1;
    }

    /// One full control cycle: plan against the last command, then commit.
    pub fn control_cycle(&mut self, q0: &Pose2, obstacles: &ObstacleSet, guidance: &Guidance) -> Result<ControlDecision> {
        let plan = self.plan(q0, obstacles, guidance, &self.last_command)?;
        self.commit(&plan);
        if !plan.validated {
            log::debug!("cycle {}: nominal failed validation, holding", plan.diagnostics.cycle);
        }
        Ok(plan)
    }
}
