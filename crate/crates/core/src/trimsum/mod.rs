//! Trimmed Birkhoff sums of power-singular observables over circle
//! rotations, with the inequality checkers that tie them to the
//! continued-fraction denominator ladder.
//!
//! The float engine streams the certified orbit grid once per request and
//! trims by removing the `k` largest observable values; the removed points
//! come from the three-gap successor walk at the interval ends rather than
//! from sorting the orbit.  An exact-rational lane recomputes small
//! instances without rounding for dispute resolution, and the checkers in
//! [`checks`] measure both sides of the ladder inequalities on concrete
//! data.

mod checks;
mod exact;
mod sums;

pub use checks::{
    cluster_gap_bound, denjoy_koksma_check, truncation_sandwich_check, weighted_log_bound_check,
    window_log_check, ClusterGapReport, TruncationSandwichReport, VariationBoundReport,
    WeightedLogBoundReport, WindowLogReport,
};
pub(crate) use checks::le_slack;
pub use exact::{trimmed_sum_exact, ExactTrimmedSum};
pub use sums::{
    birkhoff_sum, trimmed_profile, trimmed_sum, truncated_birkhoff_sum, ProfileRow,
    TrimmedSumResult,
};
