//! Experiment drivers: law sweeps, oscillation constructions, pointwise
//! oscillation probes, and bound/trajectory suites.
//!
//! Every driver follows the same contract:
//!
//! * **Deterministic.** All randomness flows from explicit seeds through the
//!   crate's own splittable generator; runs are single-threaded with a fixed
//!   reduction order, so identical configuration plus seed yields a
//!   byte-identical canonical report (see [`report::ReplayReport`]).
//! * **Exact where it matters.** Set constructions use rational endpoints
//!   ([`intervals::UnitIntervals`]), set measures are exact identities, and
//!   sampled points are re-verified to lie inside their sets exactly.
//! * **Budgeted.** Each driver computes an a-priori estimate of the number
//!   of orbit-point evaluations it will perform and refuses to start —
//!   [`Error::Budget`], before any work — if the estimate exceeds the
//!   configured budget.
//!
//! Budgets resolve in order: explicit config value, then the
//! [`BUDGET_ENV_VAR`] environment variable, then [`DEFAULT_EVAL_BUDGET`].

use crate::error::{Error, Result};

pub mod intervals;
pub mod law;
pub mod oscillation;
pub mod point;
pub mod report;
pub mod suites;

pub use intervals::UnitIntervals;
pub use law::{strong_law_run, weak_law_run, LawConfig, ScaleSpec, DEFAULT_EPSILONS};
pub use oscillation::{oscillation_1x, oscillation_beta, OscillationConfig};
pub use point::{point_osc, PointOscConfig};
pub use report::{
    LawReport, LogWeightReport, OscillationReport, PointOscReport, QnBoundReport, ReplayReport,
};
pub use suites::{logprop_trajectory, qn_bound_suite, LogWeightConfig, QnBoundConfig};

/// Default ceiling on orbit-point evaluations per experiment.
pub const DEFAULT_EVAL_BUDGET: u64 = 500_000_000;

/// Environment variable that overrides the default budget when no explicit
/// budget is configured.
pub const BUDGET_ENV_VAR: &str = "TRIMBIRK_BUDGET";

/// Resolves the evaluation budget: explicit value, else the environment
/// override, else the default. A malformed environment value is an error
/// rather than a silent fallback.
pub fn effective_budget(explicit: Option<u64>) -> Result<u64> {
    if let Some(b) = explicit {
        return Ok(b);
    }
    match std::env::var(BUDGET_ENV_VAR) {
        Ok(s) => s.trim().parse::<u64>().map_err(|_| {
            Error::Parse(format!(
                "{BUDGET_ENV_VAR} must be a nonnegative integer, got {s:?}"
            ))
        }),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_EVAL_BUDGET),
        Err(e) => Err(Error::Parse(format!("{BUDGET_ENV_VAR}: {e}"))),
    }
}

/// Rejects an experiment before any work happens when its work estimate
/// exceeds the budget.
pub fn ensure_budget(estimate: u64, budget: u64) -> Result<()> {
    if estimate > budget {
        return Err(Error::Budget(format!(
            "estimated {estimate} orbit-point evaluations exceed the budget of {budget}"
        )));
    }
    Ok(())
}

/// Milliseconds elapsed since `start`, saturating.
pub(crate) fn elapsed_ms(start: std::time::Instant) -> u64 {
    u64::try_from(start.elapsed().as_millis()).unwrap_or(u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_budget_wins_and_default_applies() {
        assert_eq!(effective_budget(Some(42)).unwrap(), 42);
        // The suite does not mutate the environment, so absent the variable
        // the default must come back.
        if std::env::var(BUDGET_ENV_VAR).is_err() {
            assert_eq!(effective_budget(None).unwrap(), DEFAULT_EVAL_BUDGET);
        }
    }

    #[test]
    fn budget_guard_rejects_oversized_estimates() {
        assert!(ensure_budget(10, 10).is_ok());
        let err = ensure_budget(11, 10).unwrap_err();
        assert!(matches!(err, Error::Budget(_)));
        assert_eq!(err.exit_code(), 3);
    }
}
