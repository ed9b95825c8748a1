//! Deterministic planar simulator: obstacles, sensing, episodes, narrowness
//! metric and scenario generators.

mod don;
mod episode;
mod generate;
mod obstacle;
mod scenario;
mod sensor;

pub use don::{compute_don, effective_width};
pub use episode::{run_episode, EpisodeResult, FailureKind, PlannerFootprint, RunOptions, TrajectorySample};
pub use generate::{corridor_scenario, gap_scenario, gap_width_for_don, restrict_modes, trap_scenario, GeneratorTemplate};
pub use obstacle::{ground_truth_collision, polygons_intersect, trail_point, Obstacle, ObstacleMotion, ObstacleShape, PlacedShape};
pub use scenario::{GapSpec, GoalTolerance, HybridSpec, Scenario, StallSpec};
pub use sensor::{sense, SensorSpec};
