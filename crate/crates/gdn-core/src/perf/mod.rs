//! Analytical performance models: roofline, latency, energy, resources,
//! constraints, and the design-space sweep.

mod constraints;
mod latency;
mod platform;
mod resources;
mod roofline;
mod sweep;

pub use constraints::{check_constraints, ConstraintReport};
pub use latency::{energy_per_token, latency_model, prediction_discrepancy_report, PredictionRow};
pub use platform::{load_platforms, Platforms, PlatformSpec};
pub use resources::{estimate_resources, linear_fit, ResourceEstimate};
pub use roofline::{
    arithmetic_intensity, bundled_intensity_points, naive_head_cycles, roofline_bound,
    IntensityPoint, Regime, RooflineBound, WorkloadProfile,
};
pub use sweep::{sweep, SweepRow, SweepTable};
