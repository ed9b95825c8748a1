//! Exact signed-distance footprints inside a batched MPPI local controller,
//! with a hybrid mode switcher, a deterministic planar simulator and
//! benchmark scenario generators.

pub mod controller;
pub mod error;
pub mod geometry;
pub mod hybrid;
pub mod kinematics;
pub mod world;

pub use error::{Error, Result};
