//! Verification oracle and scaling benchmark for the footprint distance evaluators.

mod oracle;
mod scaling;

pub use oracle::{oracle_sd_polygon, winding_number};
pub use scaling::{
    load_footprints, query_batch, scaling_benchmark, BenchFootprint, BenchReport, BenchRow, EvaluatorKind, QUERY_HALF_SPAN,
};
