//! Bound and trajectory suites over the denominator ladder.
//!
//! * [`qn_bound_suite`] grades `|S_q^1(1/x) - q ln q| <= factor * q` at every
//!   ladder denominator up to a cap, across a stratified family of starting
//!   points, one streamed orbit pass per point. Failures carry the exact
//!   starting point so any red row is replayable in isolation.
//! * [`logprop_trajectory`] tracks the ratio `N ln N / sum_j b_j q_j ln q_j`
//!   (denominator-weighted log sum of the digit decomposition of `N`) along
//!   a length grid, plus the witness lengths `a_l q_l` where a digit jump
//!   makes the two scales visibly diverge.

use num_traits::ToPrimitive;
use std::time::Instant;

use crate::contfrac::{ostrowski_expand, weighted_log_sums};
use crate::diophantine::TrimmingSequence;
use crate::error::{Error, Result};
use crate::observables::PowerObservable;
use crate::orbit::{stratified_points, RotationContext, SAMPLER_SEED};
use crate::trimsum::{le_slack, trimmed_profile};
use crate::util::{big_to_f64, ln_big};
use crate::Int;

use super::report::{
    LogWeightPoint, LogWeightReport, QnBoundReport, QnBoundRow, LOG_WEIGHT_SCHEMA,
    QN_BOUND_SCHEMA,
};
use super::{effective_budget, elapsed_ms, ensure_budget};

/// Configuration of the denominator-bound suite.
#[derive(Clone, Debug)]
pub struct QnBoundConfig {
    /// Largest denominator graded.
    pub q_limit: u64,
    /// Number of stratified starting points.
    pub x_count: u64,
    /// Seed for the stratified jitter.
    pub seed: u64,
    /// `factor` of the graded bound `|S_q^1 - q ln q| <= factor * q`.
    pub bound_factor: f64,
    /// Explicit budget override; `None` defers to the environment/default.
    pub budget: Option<u64>,
}

impl Default for QnBoundConfig {
    fn default() -> Self {
        Self {
            q_limit: 10_000,
            x_count: 20,
            seed: SAMPLER_SEED,
            bound_factor: 7.0,
            budget: None,
        }
    }
}

/// Grades the once-trimmed reciprocal sum at every ladder denominator
/// `2 <= q_n <= q_limit` against `q_n ln q_n` with the configured linear
/// error allowance. See module docs.
pub fn qn_bound_suite(ctx: &RotationContext, cfg: &QnBoundConfig) -> Result<QnBoundReport> {
    let start = Instant::now();
    if cfg.x_count == 0 {
        return Err(Error::Validation("the suite needs at least one starting point".into()));
    }
    if !cfg.bound_factor.is_finite() || cfg.bound_factor <= 0.0 {
        return Err(Error::Domain(format!(
            "the bound factor must be positive and finite, got {}",
            cfg.bound_factor
        )));
    }
    let table = ctx.table();
    let cap = cfg.q_limit.min(ctx.max_valid_n());
    let mut levels: Vec<(usize, u64)> = Vec::new();
    for l in 1..=table.depth() {
        let Some(q) = table.q(l).to_u64() else { break };
        if q > cap {
            break;
        }
        if q >= 2 && levels.last().map_or(true, |&(_, prev)| q > prev) {
            levels.push((l, q));
        }
    }
    if levels.is_empty() {
        return Err(Error::Validation(format!(
            "no ladder denominator lies in 2..={cap}"
        )));
    }
    let grid: Vec<u64> = levels.iter().map(|&(_, q)| q).collect();
    let q_max = *grid.last().expect("nonempty");

    // One streamed pass per starting point costs the largest grid length.
    let estimate = cfg
        .x_count
        .checked_mul(q_max)
        .ok_or_else(|| Error::Range("evaluation estimate overflows u64".into()))?;
    let budget = effective_budget(cfg.budget)?;
    ensure_budget(estimate, budget)?;

    let points = stratified_points(ctx, cfg.x_count, cfg.seed)?;
    let obs = PowerObservable::new(1.0, 1.0, 0.0).expect("fixed valid parameters");
    let trim = TrimmingSequence::constant(1);
    let unit_scale = |_: u64, _: u64| Ok(1.0);

    let mut rows = Vec::with_capacity(points.len() * grid.len());
    let mut failures = Vec::new();
    for (xi, x) in points.iter().enumerate() {
        let profile = trimmed_profile(ctx, &obs, x, &grid, &trim, &unit_scale)?;
        for (&(level, q), prow) in levels.iter().zip(profile.iter()) {
            let qf = q as f64;
            let expected = qf * qf.ln();
            let deviation = (prow.trimmed - expected).abs();
            let bound = cfg.bound_factor * qf;
            let pass = le_slack(deviation, bound);
            if !pass {
                failures.push(rows.len());
            }
            rows.push(QnBoundRow {
                level,
                q,
                x_index: xi as u64,
                x: x.to_string(),
                sum: prow.trimmed,
                expected,
                deviation,
                bound,
                pass,
            });
        }
    }

    Ok(QnBoundReport {
        schema: QN_BOUND_SCHEMA.into(),
        angle: ctx.stream().label().to_string(),
        angle_fingerprint: ctx.fingerprint(),
        bound_factor: cfg.bound_factor,
        q_limit: cfg.q_limit,
        x_count: cfg.x_count,
        seed: cfg.seed,
        all_pass: failures.is_empty(),
        rows,
        failures,
        evals_estimate: estimate,
        budget,
        wall_clock_ms: elapsed_ms(start),
    })
}

/// Configuration of the log-weight trajectory.
#[derive(Clone, Debug)]
pub struct LogWeightConfig {
    /// Lengths to evaluate; each must be at least 2 and within the table's
    /// certified range, strictly increasing.
    pub n_grid: Vec<u64>,
    /// Also evaluate the digit-jump witness lengths `a_l * q_l`.
    pub include_witnesses: bool,
}

/// One evaluation of the ratio `N ln N / sum_j b_j q_j ln q_j`.
fn log_weight_point(
    ctx: &RotationContext,
    n_value: &Int,
    witness_level: Option<usize>,
) -> Result<LogWeightPoint> {
    let digits = ostrowski_expand(ctx.table(), n_value)?;
    let (den, _, _) = weighted_log_sums(ctx.table(), &digits);
    let num = big_to_f64(n_value) * ln_big(n_value);
    Ok(LogWeightPoint {
        n: n_value.to_string(),
        numerator: num,
        denominator: den,
        ratio: num / den,
        witness_level,
    })
}

/// Tracks the log-weight ratio along the grid and, optionally, at the
/// digit-jump witness lengths. Performs no orbit evaluations, so it is not
/// budgeted.
pub fn logprop_trajectory(
    ctx: &RotationContext,
    cfg: &LogWeightConfig,
) -> Result<LogWeightReport> {
    let start = Instant::now();
    if cfg.n_grid.is_empty() {
        return Err(Error::Validation("length grid must be nonempty".into()));
    }
    if cfg.n_grid[0] < 2 {
        return Err(Error::Domain("lengths must be >= 2 for the N ln N scale".into()));
    }
    if cfg.n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation("length grid must be strictly increasing".into()));
    }
    let mut points = Vec::with_capacity(cfg.n_grid.len());
    for &n in &cfg.n_grid {
        points.push(log_weight_point(ctx, &Int::from(n), None)?);
    }
    let mut witnesses = Vec::new();
    if cfg.include_witnesses {
        let table = ctx.table();
        for l in 1..table.depth() {
            let q = table.q(l);
            if q < &Int::from(2) {
                continue;
            }
            let w = table.digit(l) * q;
            // The witness must stay strictly inside the table's range so its
            // digit decomposition is well defined.
            if &w >= table.q(table.depth()) {
                break;
            }
            witnesses.push(log_weight_point(ctx, &w, Some(l))?);
        }
    }
    Ok(LogWeightReport {
        schema: LOG_WEIGHT_SCHEMA.into(),
        angle: ctx.stream().label().to_string(),
        angle_fingerprint: ctx.fingerprint(),
        points,
        witnesses,
        wall_clock_ms: elapsed_ms(start),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contfrac::CoefficientStream;
    use crate::Rat;
    use num_traits::One;

    fn golden_ctx(budget: u64) -> RotationContext {
        let mut s = CoefficientStream::from_periodic(vec![], vec![Int::one()]).unwrap();
        RotationContext::make_context(&mut s, budget, 1 << 10).unwrap()
    }

    #[test]
    fn golden_ladder_passes_the_linear_allowance() {
        let ctx = golden_ctx(2_000);
        let cfg = QnBoundConfig { q_limit: 1_000, x_count: 6, ..QnBoundConfig::default() };
        let rep = qn_bound_suite(&ctx, &cfg).unwrap();
        assert!(rep.all_pass, "failures: {:?}", rep.failures);
        assert!(rep.failures.is_empty());
        // Fibonacci denominators 2..=987 give 14 levels, times 6 points.
        assert_eq!(rep.rows.len(), 14 * 6);
        // Levels are strictly increasing within each starting point.
        for w in rep.rows[..14].windows(2) {
            assert!(w[0].q < w[1].q);
        }
        // Every row embeds a parseable exact starting point.
        let x: Rat = rep.rows[0].x.parse().unwrap();
        assert!(x > Rat::from_integer(Int::from(0)) && x < Rat::one());
    }

    #[test]
    fn tight_negative_control_fails_and_reports_the_instance() {
        let ctx = golden_ctx(2_000);
        let cfg = QnBoundConfig {
            q_limit: 1_000,
            x_count: 6,
            bound_factor: 0.05,
            ..QnBoundConfig::default()
        };
        let rep = qn_bound_suite(&ctx, &cfg).unwrap();
        assert!(!rep.all_pass);
        let i = rep.failures[0];
        assert!(!rep.rows[i].pass);
        assert!(rep.rows[i].deviation > rep.rows[i].bound);
        assert!(!rep.rows[i].x.is_empty());
    }

    #[test]
    fn suite_budget_gate_fires_before_work() {
        let ctx = golden_ctx(2_000);
        let cfg = QnBoundConfig {
            q_limit: 1_000,
            x_count: 6,
            budget: Some(100),
            ..QnBoundConfig::default()
        };
        assert!(matches!(qn_bound_suite(&ctx, &cfg), Err(Error::Budget(_))));
    }

    #[test]
    fn ratio_is_exactly_one_at_ladder_denominators() {
        let ctx = golden_ctx(2_000);
        // Golden q values: 2, 3, 5, 8, ... — each is its own decomposition.
        let cfg = LogWeightConfig { n_grid: vec![2, 3, 5, 8, 13, 21], include_witnesses: false };
        let rep = logprop_trajectory(&ctx, &cfg).unwrap();
        for p in &rep.points {
            assert_eq!(p.ratio, 1.0, "n = {}", p.n);
        }
    }

    #[test]
    fn golden_ratio_tightens_with_length_and_never_drops_below_one() {
        let ctx = golden_ctx(2_000_000);
        let cfg = LogWeightConfig {
            n_grid: vec![1_000, 10_000, 100_000, 1_000_000],
            include_witnesses: false,
        };
        let rep = logprop_trajectory(&ctx, &cfg).unwrap();
        for p in &rep.points {
            assert!(p.ratio >= 1.0 - 1e-9, "n = {}, ratio = {}", p.n, p.ratio);
        }
        let first = rep.points.first().unwrap().ratio;
        let last = rep.points.last().unwrap().ratio;
        assert!(last < first, "ratio should tighten: {first} -> {last}");
    }

    #[test]
    fn digit_jump_witnesses_show_the_scale_mismatch() {
        // q_4 = 1009^2 + 1 after the digit 1009: at N = a_3 q_3 the ratio is
        // 1 + ln(a_3)/ln(q_3) ~ 2.
        let pre: Vec<Int> = [1, 1008, 1009].into_iter().map(Int::from).collect();
        let mut s = CoefficientStream::from_periodic(pre, vec![Int::one()]).unwrap();
        let ctx = RotationContext::make_context(&mut s, 4_096, 16).unwrap();
        let cfg = LogWeightConfig { n_grid: vec![100, 1_000], include_witnesses: true };
        let rep = logprop_trajectory(&ctx, &cfg).unwrap();
        let w = rep
            .witnesses
            .iter()
            .find(|p| p.witness_level == Some(3))
            .expect("level-3 witness present");
        assert_eq!(w.n, (1009 * 1009).to_string());
        assert!(w.ratio > 1.4, "witness ratio {}", w.ratio);
    }
}
