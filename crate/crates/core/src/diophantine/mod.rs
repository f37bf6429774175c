//! Prefix Diophantine diagnostics, trimming sequences, and constructors of
//! angles whose denominator growth lands in prescribed windows.

pub mod conditions;
pub mod iterlog;
pub mod roth;
pub mod seq1x;
pub mod trimming;
pub mod window;

pub use conditions::{
    canonical_subsequence, condition_d, condition_iii, ConditionPoint, ConditionTrajectory,
    CANONICAL_MARGIN,
};
pub use iterlog::iterated_log;
pub use roth::{roth_profile, DiophantineReport, ROTH_RATIO_THRESHOLD};
pub use seq1x::{
    construct_alpha_seq1xrem, u_threshold, verify_seq1x_stream, DominatingRule,
    DEFAULT_SCAN_BUDGET,
};
pub use trimming::{TrimRule, TrimmingSequence};
pub use window::{construct_alpha_in_window, GrowthWindow, WindowExpr};
