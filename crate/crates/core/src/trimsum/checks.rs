//! Inequality checkers tying trimmed and truncated sums to their
//! denominator-ladder predictions.
//!
//! Each checker measures both sides of a stated bound on concrete data and
//! reports the verdict together with the measured quantities, so failures
//! are diagnosable rather than just red.  Verdicts allow a `1e-9` relative
//! slack for float evaluation noise; the bounds themselves have integer
//! margins, so the slack never flips a mathematically decided comparison.

use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::{PowerObservable, TruncatedObservable};
use crate::orbit::RotationContext;
use crate::trimsum::sums::{trimmed_sum, truncated_birkhoff_sum};
use crate::util::{big_to_f64, rat_to_f64};
use crate::{Int, Rat};

/// `a <= b` up to relative slack for accumulated rounding.
pub(crate) fn le_slack(a: f64, b: f64) -> bool {
    a <= b + 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Reciprocal observable `f(x) = 1/x`, the reference singularity for the
/// denominator-ladder bounds.
fn reciprocal() -> PowerObservable<f64> {
    PowerObservable::new(1.0, 1.0, 0.0).expect("fixed valid parameters")
}

/// Truncation threshold `1/(q_n + q_{n-1})` for ladder level `n`; `None`
/// when the threshold reaches `1` (level 1, where the truncated observable
/// vanishes identically).
fn ladder_threshold(ctx: &RotationContext, level: usize) -> Option<Rat> {
    let den = ctx.table().q(level) + ctx.table().q(level - 1);
    if den <= Int::one() {
        return None;
    }
    Some(Rat::new(Int::one(), den))
}

/// Birkhoff sum of `1/x` truncated at the ladder threshold of `level`.
fn ladder_truncated_sum(ctx: &RotationContext, x: &Rat, n: u64, level: usize) -> Result<f64> {
    match ladder_threshold(ctx, level) {
        None => Ok(0.0),
        Some(t) => {
            let trunc = reciprocal().truncate(&t)?;
            Ok(truncated_birkhoff_sum(ctx, &trunc, x, n)?.0)
        }
    }
}

/// Outcome of the bounded-variation orbit-sum check at a denominator.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VariationBoundReport {
    /// Ladder level whose denominator was used as the orbit length.
    pub level: usize,
    /// The orbit length `q_level`.
    pub n_points: u64,
    /// Streamed sum of the truncated observable.
    pub sum: f64,
    /// `n_points` times the exact integral of the truncated observable.
    pub expected: f64,
    /// `|sum - expected|`.
    pub discrepancy: f64,
    /// Total variation of the truncated observable (the bound).
    pub bound: f64,
    pub pass: bool,
}

/// Checks the bounded-variation inequality
/// `|S_q(f_t)(x) - q * integral(f_t)| <= Var(f_t)` at `q = q_level`, the
/// classical Denjoy–Koksma bound at a continued-fraction denominator.
pub fn denjoy_koksma_check(
    ctx: &RotationContext,
    trunc: &TruncatedObservable<f64>,
    x: &Rat,
    level: usize,
) -> Result<VariationBoundReport> {
    if level == 0 {
        return Err(Error::Domain("ladder level must be >= 1".into()));
    }
    let q = ctx
        .table()
        .q(level)
        .to_u64()
        .ok_or_else(|| Error::Range(format!("q_{level} does not fit u64")))?;
    let (sum, _) = truncated_birkhoff_sum(ctx, trunc, x, q)?;
    let expected = q as f64 * trunc.integral();
    let discrepancy = (sum - expected).abs();
    let bound = trunc.variation();
    Ok(VariationBoundReport {
        level,
        n_points: q,
        sum,
        expected,
        discrepancy,
        bound,
        pass: le_slack(discrepancy, bound),
    })
}

/// Outcome of the trimming/truncation exchange check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TruncationSandwichReport {
    /// Orbit length.
    pub n: u64,
    /// Ladder level of `n` (largest with `q_level <= n`).
    pub level: usize,
    /// Window count `floor(n / q_level)`.
    pub b_n: u64,
    /// Trimmed sum `S_n^{b_n + 1}` of `1/x`.
    pub trimmed: f64,
    /// Sum of `1/x` truncated at `1/(q_level + q_{level-1})`.
    pub truncated: f64,
    /// `trimmed <= truncated` (with slack).
    pub lower_pass: bool,
    /// `truncated <= trimmed + 3n` (with slack).
    pub upper_pass: bool,
    pub pass: bool,
}

/// Checks the two-sided exchange bound between trimming and truncation for
/// `f(x) = 1/x`:
/// `S_n^{b_n+1}(f) <= S_n(f_t) <= S_n^{b_n+1}(f) + 3n`
/// where `t = 1/(q_level + q_{level-1})` and `b_n = floor(n / q_level)`.
pub fn truncation_sandwich_check(
    ctx: &RotationContext,
    x: &Rat,
    n: u64,
) -> Result<TruncationSandwichReport> {
    let level = ctx.table().level_of(&Int::from(n))?;
    let q = ctx.table().q(level).to_u64().ok_or_else(|| {
        Error::Range(format!("q_{level} does not fit u64"))
    })?;
    let b_n = n / q;
    let trimmed = trimmed_sum(ctx, &reciprocal(), x, n, b_n + 1)?.trimmed;
    let truncated = ladder_truncated_sum(ctx, x, n, level)?;
    let lower_pass = le_slack(trimmed, truncated);
    let upper_pass = le_slack(truncated, trimmed + 3.0 * n as f64);
    Ok(TruncationSandwichReport {
        n,
        level,
        b_n,
        trimmed,
        truncated,
        lower_pass,
        upper_pass,
        pass: lower_pass && upper_pass,
    })
}

/// Outcome of the weighted-logarithm growth check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightedLogBoundReport {
    /// Orbit length.
    pub n: u64,
    /// Ladder level of `n`.
    pub level: usize,
    /// Sum of `1/x` truncated at the ladder threshold.
    pub truncated: f64,
    /// Predicted main term `sum_j b_j q_j ln q_j` over the digit expansion
    /// of `n`.
    pub main_term: f64,
    /// `|truncated - main_term|`.
    pub discrepancy: f64,
    /// `16 n + 2 sum a_j q_j ln b_j` (nonzero digits below the top level).
    pub bound: f64,
    pub pass: bool,
}

/// Checks that the truncated sum of `1/x` tracks its weighted-logarithm
/// main term:
/// `|S_n(f_t) - sum_j b_j q_j ln q_j| <= 16 n + 2 sum a_j q_j ln b_j`,
/// with the digit expansion of `n` in the denominator ladder, the threshold
/// `t = 1/(q_level + q_{level-1})`, and the correction sum running over
/// nonzero digits strictly below the top level.
pub fn weighted_log_bound_check(
    ctx: &RotationContext,
    x: &Rat,
    n: u64,
) -> Result<WeightedLogBoundReport> {
    let level = ctx.table().level_of(&Int::from(n))?;
    let digits = crate::contfrac::ostrowski_expand(ctx.table(), &Int::from(n))?;
    let (main_term, correction, _) = crate::contfrac::weighted_log_sums(ctx.table(), &digits);
    let truncated = ladder_truncated_sum(ctx, x, n, level)?;
    let discrepancy = (truncated - main_term).abs();
    let bound = 16.0 * n as f64 + 2.0 * correction;
    Ok(WeightedLogBoundReport {
        n,
        level,
        truncated,
        main_term,
        discrepancy,
        bound,
        pass: le_slack(discrepancy, bound),
    })
}

/// Outcome of the single-window logarithm check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WindowLogReport {
    /// Ladder level whose denominator is the orbit length.
    pub level: usize,
    /// The orbit length `q_level`.
    pub q: u64,
    /// Trimmed sum `S_q^1(1/x)`.
    pub trimmed: f64,
    /// Main term `q ln q`.
    pub main_term: f64,
    /// `|trimmed - main_term|`.
    pub discrepancy: f64,
    /// `7 q`.
    pub bound: f64,
    pub pass: bool,
}

/// Checks the single-window bound `|S_q^1(1/x)(x) - q ln q| <= 7 q` at
/// `q = q_level`: over one denominator window, trimming exactly one point
/// pins the sum of `1/x` to `q ln q` uniformly in `x`.
pub fn window_log_check(ctx: &RotationContext, x: &Rat, level: usize) -> Result<WindowLogReport> {
    if level == 0 {
        return Err(Error::Domain("ladder level must be >= 1".into()));
    }
    let q = ctx
        .table()
        .q(level)
        .to_u64()
        .ok_or_else(|| Error::Range(format!("q_{level} does not fit u64")))?;
    let trimmed = trimmed_sum(ctx, &reciprocal(), x, q, 1)?.trimmed;
    let main_term = q as f64 * (q as f64).ln();
    let discrepancy = (trimmed - main_term).abs();
    let bound = 7.0 * q as f64;
    Ok(WindowLogReport { level, q, trimmed, main_term, discrepancy, bound, pass: le_slack(discrepancy, bound) })
}

/// Outcome of the cluster-point lower-bound check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClusterGapReport {
    /// Ladder level of `n`.
    pub level: usize,
    /// Orbit length.
    pub n: u64,
    /// Trimming count probed.
    pub k: u64,
    /// Window count `floor(n / q_level)`.
    pub b_n: u64,
    /// Position of the smallest positive point of the first `q_level`
    /// points (the cluster seed).
    pub epsilon: f64,
    /// Orbit index of that point.
    pub j1: u64,
    /// Whether the whole cluster chain `j1 + i q_level`, `i <= b_n`, stays
    /// inside the first `n` points.
    pub chain_fits: bool,
    /// Whether the ladder remainder at this level is positive (the chain
    /// moves away from zero).
    pub sign_positive: bool,
    /// Measured gap `S_n^k - S_n^{b_n+1}` for `1/x`.
    pub measured: f64,
    /// Harmonic lower bound `sum_{i=k}^{b_n} 1/(epsilon + i/q_{level+1})`.
    pub harmonic_bound: f64,
    /// `Some(measured >= harmonic_bound)` when the hypotheses gate the
    /// inequality; `None` means the quantities are reported without a
    /// claimed verdict.
    pub verdict: Option<bool>,
}

/// Measures the gap between a lightly trimmed and a fully window-trimmed
/// sum of `1/x` and compares it against the harmonic cluster bound
/// `sum_{i=k}^{b_n} 1/(epsilon + i/q_{level+1})`.
///
/// The bound is claimed (verdict `Some`) only under the hypotheses that
/// make the cluster argument airtight: positive remainder sign at the
/// level, the chain `j1 + i q_level` staying inside the orbit, and
/// `k <= b_n + 1 <= n`.  Otherwise the measured quantities are returned
/// with `verdict: None`.
pub fn cluster_gap_bound(
    ctx: &RotationContext,
    x: &Rat,
    n: u64,
    k: u64,
) -> Result<ClusterGapReport> {
    let level = ctx.table().level_of(&Int::from(n))?;
    let q = ctx
        .table()
        .q(level)
        .to_u64()
        .ok_or_else(|| Error::Range(format!("q_{level} does not fit u64")))?;
    let b_n = n / q;
    let seed = ctx.x_min(x, q)?;
    let epsilon = rat_to_f64(&seed.position());
    let j1 = seed.index;
    let q_next = big_to_f64(ctx.table().q(level + 1));
    let light = trimmed_sum(ctx, &reciprocal(), x, n, k)?.trimmed;
    let heavy = trimmed_sum(ctx, &reciprocal(), x, n, b_n + 1)?.trimmed;
    let measured = light - heavy;
    let mut harmonic_bound = 0.0;
    let mut i = k;
    while i <= b_n {
        harmonic_bound += 1.0 / (epsilon + i as f64 / q_next);
        i += 1;
    }
    let chain_fits = b_n
        .checked_mul(q)
        .and_then(|c| c.checked_add(j1))
        .map(|last| last <= n - 1)
        .unwrap_or(false);
    let sign_positive = ctx.table().remainder_sign(level) == 1;
    let gated = sign_positive && chain_fits && k <= b_n + 1 && b_n + 1 <= n;
    let verdict = gated.then(|| le_slack(harmonic_bound, measured));
    Ok(ClusterGapReport {
        level,
        n,
        k,
        b_n,
        epsilon,
        j1,
        chain_fits,
        sign_positive,
        measured,
        harmonic_bound,
        verdict,
    })
}
