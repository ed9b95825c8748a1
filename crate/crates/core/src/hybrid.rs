//! Hybrid locomotion: one MPPI controller per mode, switching-penalized
//! selection with a cooldown, mode projection and deadzone correction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::controller::{CyclePlan, Guidance, MppiController, MppiParams};
use crate::error::{Error, Result};
use crate::geometry::{FootprintSpec, ObstacleSet, Pose2};
use crate::kinematics::{ControlInput, KinematicLimits, MotionModel};

/// Switching and actuator post-processing parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HybridParams {
    /// Cost added to every mode other than the previous one.
    pub lambda_switch: f64,
    /// Cycles during which a fresh switch cannot be undone.
    pub cooldown_cycles: u32,
    /// Smallest executable translational speed (m/s).
    pub v_min: f64,
    /// Smallest executable rotational speed (rad/s).
    pub omega_min: f64,
    /// Translational magnitudes at or below this pass through unchanged.
    pub noise_deadzone_v: f64,
    /// Rotational magnitudes at or below this pass through unchanged.
    pub noise_deadzone_omega: f64,
}

impl Default for HybridParams {
    fn default() -> Self {
        Self {
            lambda_switch: 5.0,
            cooldown_cycles: 10,
            v_min: 0.05,
            omega_min: 0.05,
            noise_deadzone_v: 0.01,
            noise_deadzone_omega: 0.01,
        }
    }
}

impl HybridParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_switch >= 0.0) {
            return Err(Error::Params(format!("lambda_switch {} must be nonnegative", self.lambda_switch)));
        }
        if !(0.0 <= self.noise_deadzone_v && self.noise_deadzone_v < self.v_min) {
            return Err(Error::Params("need 0 ≤ noise_deadzone_v < v_min".into()));
        }
        if !(0.0 <= self.noise_deadzone_omega && self.noise_deadzone_omega < self.omega_min) {
            return Err(Error::Params("need 0 ≤ noise_deadzone_omega < omega_min".into()));
        }
        Ok(())
    }
}

/// Chassis-level command covering every mode's components.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RawCommand {
    /// Body-frame forward velocity.
    pub vx: f64,
    /// Body-frame lateral velocity.
    pub vy: f64,
    pub omega: f64,
    /// Ackermann steering angle.
    pub steering: f64,
}

impl RawCommand {
    /// Lifts a mode-shaped control to a chassis command.
    pub fn from_control(mode: &MotionModel, u: &ControlInput) -> Self {
        let g = |i| u.get(i);
        match mode {
            MotionModel::Diff => Self { vx: g(0), omega: g(1), ..Default::default() },
            MotionModel::Ackermann { .. } => Self { vx: g(0), steering: g(1), ..Default::default() },
            MotionModel::Omni => Self { vx: g(0), vy: g(1), omega: g(2), ..Default::default() },
            MotionModel::Spin => Self { omega: g(0), ..Default::default() },
            MotionModel::Parallel => Self { vy: g(0), ..Default::default() },
        }
    }
}

/// Keeps only the components `mode` can execute.
pub fn project_to_mode(raw: &RawCommand, mode: &MotionModel) -> ControlInput {
    match mode {
        MotionModel::Diff => ControlInput::from_slice(&[raw.vx, raw.omega]),
        MotionModel::Ackermann { .. } => ControlInput::from_slice(&[raw.vx, raw.steering]),
        MotionModel::Omni => ControlInput::from_slice(&[raw.vx, raw.vy, raw.omega]),
        MotionModel::Spin => ControlInput::from_slice(&[raw.omega]),
        MotionModel::Parallel => ControlInput::from_slice(&[raw.vy]),
    }
}

/// Raises commands stuck between the noise deadzone and the smallest
/// executable value up to that value, keeping direction (translation) and
/// sign (rotation).
pub fn deadzone_correct(u: &ControlInput, mode: &MotionModel, params: &HybridParams) -> ControlInput {
    let mut out = *u;
    let lin: &[usize] = match mode {
        MotionModel::Diff | MotionModel::Ackermann { .. } | MotionModel::Parallel => &[0],
        MotionModel::Omni => &[0, 1],
        MotionModel::Spin => &[],
    };
    let ang = match mode {
        MotionModel::Diff => Some(1),
        MotionModel::Omni => Some(2),
        MotionModel::Spin => Some(0),
        MotionModel::Ackermann { .. } | MotionModel::Parallel => None,
    };
    let s = out.as_mut_slice();
    let mag = lin.iter().map(|&i| s[i] * s[i]).sum::<f64>().sqrt();
    // Rescaled planar speeds can land an ulp short of v_min; the slack keeps
    // a corrected command from being corrected again.
    if mag > params.noise_deadzone_v && mag < params.v_min * (1.0 - 1e-12) {
        if let [i] = lin {
            s[*i] = params.v_min.copysign(s[*i]);
        } else {
            let scale = params.v_min / mag;
            for &i in lin {
                s[i] *= scale;
            }
        }
    }
    if let Some(i) = ang {
        let w = s[i].abs();
        if w > params.noise_deadzone_omega && w < params.omega_min {
            s[i] = params.omega_min.copysign(s[i]);
        }
    }
    out
}

/// Switching state carried between cycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HybridState {
    /// Index of the previously active mode.
    pub previous_mode: usize,
    /// Remaining cooldown cycles.
    pub cooldown: u32,
}

/// Mode chosen by [`select_mode`] and the next switching state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeSelection {
    /// `None` when no mode validated.
    pub mode: Option<usize>,
    pub state: HybridState,
}

/// Switching cost `J + λ_switch·1(m ≠ m_prev)`, `+∞` for modes that failed
/// validation (`None`).
pub fn switched_costs(costs: &[Option<f64>], previous_mode: usize, lambda_switch: f64) -> Vec<f64> {
    costs
        .iter()
        .enumerate()
        .map(|(m, c)| match c {
            Some(j) if m == previous_mode => *j,
            Some(j) => j + lambda_switch,
            None => f64::INFINITY,
        })
        .collect()
}

/// Picks the mode for this cycle. Ties favor the previous mode, then the
/// declaration order. While the cooldown is active a switch is refused and
/// the counter still decrements; a switch restarts the cooldown.
pub fn select_mode(costs: &[Option<f64>], state: HybridState, params: &HybridParams) -> ModeSelection {
    let bar = switched_costs(costs, state.previous_mode, params.lambda_switch);
    let mut best: Option<usize> = None;
    for (m, &c) in bar.iter().enumerate() {
        if !c.is_finite() {
            continue;
        }
        best = match best {
            None => Some(m),
            Some(b) if c < bar[b] || (c == bar[b] && m == state.previous_mode) => Some(m),
            keep => keep,
        };
    }
    let decrement = HybridState {
        previous_mode: state.previous_mode,
        cooldown: state.cooldown.saturating_sub(1),
    };
    match best {
        None => ModeSelection {
            mode: None,
            state: decrement,
        },
        Some(m) if m == state.previous_mode => ModeSelection { mode: Some(m), state: decrement },
        Some(_) if state.cooldown > 0 => ModeSelection {
            mode: costs.get(state.previous_mode).and_then(|c| c.map(|_| state.previous_mode)),
            state: decrement,
        },
        Some(m) => ModeSelection {
            mode: Some(m),
            state: HybridState {
                previous_mode: m,
                cooldown: params.cooldown_cycles,
            },
        },
    }
}

/// One locomotion mode with its own limits and MPPI parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub model: MotionModel,
    #[serde(default)]
    pub limits: Option<KinematicLimits>,
}

/// Per-cycle output of the hybrid controller.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridDecision {
    /// Post-processed command in the selected (or retained) mode's shape.
    pub command: ControlInput,
    /// Mode the command belongs to.
    pub mode: usize,
    /// Whether a validated mode was available.
    pub validated: bool,
    pub switched: bool,
    /// Switching costs per mode (`+∞` if invalid).
    pub switched_costs: Vec<f64>,
    pub plans: Vec<CyclePlan>,
}

/// Hybrid controller: every mode plans each cycle and keeps its own warm start.
#[derive(Debug, Clone)]
pub struct HybridController {
    modes: Vec<MppiController>,
    params: HybridParams,
    state: HybridState,
}

impl HybridController {
    pub fn new(modes: &[ModeSpec], footprint: &FootprintSpec, mppi: &MppiParams, params: HybridParams, initial_mode: usize) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::Params("hybrid controller needs at least one mode".into()));
        }
        if initial_mode >= modes.len() {
            return Err(Error::Params(format!("initial mode {initial_mode} out of range")));
        }
        params.validate()?;
        let controllers = modes
            .iter()
            .map(|m| {
                let limits = m.limits.clone().unwrap_or_else(|| KinematicLimits::platform_defaults(&m.model));
                MppiController::new(m.model, footprint.clone(), limits, mppi.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            modes: controllers,
            params,
            state: HybridState {
                previous_mode: initial_mode,
                cooldown: 0,
            },
        })
    }

    pub fn state(&self) -> HybridState {
        self.state
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn mode_model(&self, m: usize) -> &MotionModel {
        self.modes[m].model()
    }

    pub fn controller(&self, m: usize) -> &MppiController {
        &self.modes[m]
    }

    pub fn params(&self) -> &HybridParams {
        &self.params
    }

    /// Plans every mode, selects one and post-processes its command. A mode
    /// other than the active one is rate-limited from rest.
    pub fn hybrid_cycle(&mut self, q0: &Pose2, obstacles: &ObstacleSet, guidance: &Guidance) -> Result<HybridDecision> {
        let prev = self.state.previous_mode;
        let plans = self
            .modes
            .par_iter()
            .enumerate()
            .map(|(m, c)| {
                let u_prev = if m == prev {
                    c.last_command()
                } else {
                    ControlInput::zeros(c.model().control_dim())
                };
                c.plan(q0, obstacles, guidance, &u_prev)
            })
            .collect::<Result<Vec<_>>>()?;
        let costs: Vec<Option<f64>> = plans.iter().map(|p| p.validated.then_some(p.check.cost)).collect();
        let bar = switched_costs(&costs, prev, self.params.lambda_switch);
        let selection = select_mode(&costs, self.state, &self.params);
        self.state = selection.state;
        for (c, plan) in self.modes.iter_mut().zip(&plans) {
            c.commit(plan);
        }
        let (mode, command, validated) = match selection.mode {
            Some(m) => {
                let model = *self.modes[m].model();
                let raw = RawCommand::from_control(&model, &plans[m].command);
                let projected = project_to_mode(&raw, &model);
                (m, deadzone_correct(&projected, &model, &self.params), true)
            }
            None => (prev, ControlInput::zeros(self.modes[prev].model().control_dim()), false),
        };
        for (m, c) in self.modes.iter_mut().enumerate() {
            if m != mode || !validated {
                c.set_last_command(ControlInput::zeros(c.model().control_dim()));
            }
        }
        Ok(HybridDecision {
            command,
            mode,
            validated,
            switched: mode != prev,
            switched_costs: bar,
            plans,
        })
    }
}
