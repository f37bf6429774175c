//! Exact simulation of rotation orbits: certified positions on a deep
//! convergent proxy grid, selection of the smallest positive positions, and
//! the structural predicates those selections feed.

pub mod context;
pub mod kernel;
pub mod predicates;
pub mod sampler;
pub mod select;

pub use context::{OrbitGrid, OrbitPoint, RotationContext, DEFAULT_SAFETY};
pub use kernel::{kernel_for, KernelInt, KernelKind};
pub use predicates::{
    count_in_interval, j1_coincidence, min_pairwise_distance, CoincidenceReport,
};
pub use sampler::{auto_point, stratified_points, SAMPLER_SEED};
pub use select::{argmin_mod, k_smallest_positive, k_smallest_positive_oracle, SelectedPoint};
