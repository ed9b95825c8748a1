use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DEFAULT_EMPTY_CLEARANCE;
use crate::kinematics::MotionModel;

/// Weights of the navigation (task) cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskWeights {
    /// Squared goal distance, every step.
    pub goal: f64,
    /// Squared goal distance of the terminal state.
    pub goal_terminal: f64,
    /// Squared wrapped heading error of the terminal state.
    pub heading: f64,
    /// Squared distance to the guidance polyline, every step.
    pub xtrack: f64,
    /// Reward per meter of arc-length progress along the guidance, every step.
    pub progress: f64,
}

impl Default for TaskWeights {
    fn default() -> Self {
        Self {
            goal: 0.0,
            goal_terminal: 5.0,
            heading: 1.0,
            xtrack: 5.0,
            progress: 2.0,
        }
    }
}

/// Sampling, horizon and cost parameters of one MPPI controller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MppiParams {
    /// Rollout count K.
    pub samples: usize,
    /// Horizon length T in steps.
    pub horizon: usize,
    pub dt: f64,
    /// Softmax temperature λ.
    pub lambda: f64,
    /// Per-component perturbation standard deviations. Empty means the
    /// model default (0.3 for every component).
    pub sigma: Vec<f64>,
    pub d_safe: f64,
    pub w_coll: f64,
    pub w_rep: f64,
    pub w_inf: f64,
    pub task: TaskWeights,
    /// Per-component quadratic control weights. Empty means zero.
    pub control_weights: Vec<f64>,
    pub rng_seed: u64,
    /// Clearance reported when no obstacle point is observed.
    pub empty_clearance: f64,
}

impl Default for MppiParams {
    fn default() -> Self {
        Self {
            samples: 1000,
            horizon: 50,
            dt: 0.1,
            lambda: 1.0,
            sigma: Vec::new(),
            d_safe: 0.1,
            w_coll: 1e6,
            w_rep: 50.0,
            w_inf: 1e9,
            task: TaskWeights::default(),
            control_weights: Vec::new(),
            rng_seed: 0,
            empty_clearance: DEFAULT_EMPTY_CLEARANCE,
        }
    }
}

pub const DEFAULT_SIGMA: f64 = 0.3;

impl MppiParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Params(m));
        if self.samples < 1 {
            return fail("samples (K) must be at least 1".into());
        }
        if self.horizon < 1 {
            return fail("horizon (T) must be at least 1".into());
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return fail(format!("dt {} must be positive", self.dt));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return fail(format!("lambda {} must be positive", self.lambda));
        }
        if let Some(s) = self.sigma.iter().find(|s| !(**s > 0.0) || !s.is_finite()) {
            return fail(format!("sigma component {s} must be positive"));
        }
        if !(self.d_safe >= 0.0) {
            return fail(format!("d_safe {} must be nonnegative", self.d_safe));
        }
        for (name, w) in [("w_coll", self.w_coll), ("w_rep", self.w_rep), ("w_inf", self.w_inf)] {
            if !(w >= 0.0) {
                return fail(format!("{name} {w} must be nonnegative"));
            }
        }
        if self.control_weights.iter().any(|w| !(*w >= 0.0)) {
            return fail("control weights must be nonnegative".into());
        }
        Ok(())
    }

    pub fn validate_for(&self, model: &MotionModel) -> Result<()> {
        self.validate()?;
        let dim = model.control_dim();
        if !self.sigma.is_empty() && self.sigma.len() != dim {
            return Err(Error::Params(format!(
                "sigma has {} components, model `{}` needs {dim}",
                self.sigma.len(),
                model.name()
            )));
        }
        if !self.control_weights.is_empty() && self.control_weights.len() != dim {
            return Err(Error::Params(format!(
                "control_weights has {} components, model `{}` needs {dim}",
                self.control_weights.len(),
                model.name()
            )));
        }
        Ok(())
    }

    pub fn sigma_for(&self, model: &MotionModel) -> [f64; 3] {
        let mut s = [0.0; 3];
        for (i, v) in s.iter_mut().enumerate().take(model.control_dim()) {
            *v = self.sigma.get(i).copied().unwrap_or(DEFAULT_SIGMA);
        }
        s
    }

    pub fn control_weights_for(&self, model: &MotionModel) -> [f64; 3] {
        let mut w = [0.0; 3];
        for (i, v) in w.iter_mut().enumerate().take(model.control_dim()) {
            *v = self.control_weights.get(i).copied().unwrap_or(0.0);
        }
        w
    }
}
