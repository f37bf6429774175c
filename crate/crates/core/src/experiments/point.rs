//! Single-point oscillation probe: the spread between a lightly trimmed and
//! a fully cluster-trimmed sum at one starting point whose orbit approaches
//! the singularity unusually fast.
//!
//! The probe fixes a denominator level `q`, measures the smallest positive
//! position of the first `q` orbit points exactly, and tests it against the
//! closeness hypothesis `x_min < 1 / (q ln(q) psi(q))`, where `psi` is a
//! `K`-fold iterated logarithm. The orbit length follows the gauge rule
//! `N = ceil(q_next psi(q) / ln q)` unless an explicit length is supplied.
//! The headline spread `S_N^1 - S_N^{b+1}` (with `b = floor(N / q)` windows)
//! is compared against `N ln N / 2`; the verdict is graded only when the
//! hypothesis holds and the window count is non-degenerate, and the report
//! always embeds the cluster-chain bound of the same spread.

use num_traits::ToPrimitive;
use std::time::Instant;

use crate::diophantine::iterated_log;
use crate::error::{Error, Result};
use crate::observables::PowerObservable;
use crate::orbit::RotationContext;
use crate::trimsum::{cluster_gap_bound, le_slack, trimmed_sum};
use crate::util::rat_to_f64;
use crate::Rat;

use super::report::{PointOscReport, POINT_OSC_SCHEMA};
use super::{effective_budget, elapsed_ms, ensure_budget};

/// Iterate count whose gauge matches the literal slow-growth rule.
const LITERAL_PSI_ITERATES: usize = 5;

/// Configuration of the single-point probe.
#[derive(Clone, Debug)]
pub struct PointOscConfig {
    /// Explicit orbit length; `None` uses the gauge rule.
    pub n_override: Option<u64>,
    /// `K` of the `K`-fold iterated logarithm gauge.
    pub psi_iterates: usize,
    /// Explicit budget override; `None` defers to the environment/default.
    pub budget: Option<u64>,
}

impl Default for PointOscConfig {
    fn default() -> Self {
        Self { n_override: None, psi_iterates: 2, budget: None }
    }
}

/// Runs the single-point oscillation probe at `level` from starting point
/// `x`. See the module docs for the quantities and gates.
pub fn point_osc(
    ctx: &RotationContext,
    level: usize,
    x: &Rat,
    cfg: &PointOscConfig,
) -> Result<PointOscReport> {
    let start = Instant::now();
    let table = ctx.table();
    if level < 1 || level > table.depth() {
        return Err(Error::Range(format!(
            "level {level} outside the table range 1..={}",
            table.depth()
        )));
    }
    let q_int = table.q(level).clone();
    let q = q_int
        .to_u64()
        .ok_or_else(|| Error::Range(format!("q_level = {q_int} does not fit u64")))?;
    if q < 2 {
        return Err(Error::Domain(format!(
            "the probe needs q_level >= 2 for its logarithmic scales, got {q}"
        )));
    }
    let q_next = table.q(level + 1).clone();
    let ln_q = (q as f64).ln();
    let psi_value = iterated_log(cfg.psi_iterates, q as f64)?;
    if psi_value <= 0.0 {
        return Err(Error::Precondition(format!(
            "the {}-fold iterated logarithm of q_level = {q} is {psi_value} <= 0; \
             this gauge needs far larger denominators — use fewer iterates or an \
             explicit length",
            cfg.psi_iterates
        )));
    }
    let psi = format!("log{}", cfg.psi_iterates);

    let (n, n_rule) = match cfg.n_override {
        Some(n) => (n, "explicit"),
        None => {
            let raw = crate::util::big_to_f64(&q_next) * psi_value / ln_q;
            if !raw.is_finite() || raw >= u64::MAX as f64 {
                return Err(Error::Range(format!(
                    "gauge length {raw:e} overflows the supported range"
                )));
            }
            let rule = if cfg.psi_iterates == LITERAL_PSI_ITERATES {
                "literal"
            } else {
                "generalized-scale"
            };
            ((raw.ceil() as u64).max(1), rule)
        }
    };
    if n == 0 {
        return Err(Error::Domain("orbit length must be >= 1".into()));
    }
    if n > ctx.max_valid_n() {
        return Err(Error::Range(format!(
            "length {n} exceeds the certified range {} of this context",
            ctx.max_valid_n()
        )));
    }

    // One selection pass over q points, one trimmed orbit pass, and the
    // cluster-bound check (two more passes plus its own selection).
    let estimate = n
        .checked_mul(3)
        .and_then(|v| v.checked_add(q.checked_mul(2)?))
        .ok_or_else(|| Error::Range("evaluation estimate overflows u64".into()))?;
    let budget = effective_budget(cfg.budget)?;
    ensure_budget(estimate, budget)?;

    let seed = ctx.x_min(x, q)?;
    let min_pos = seed.position();
    let hypothesis_threshold = 1.0 / (q as f64 * ln_q * psi_value);
    let hypothesis_met = rat_to_f64(&min_pos) < hypothesis_threshold;

    let b_n = n / q;
    let reciprocal = PowerObservable::new(1.0, 1.0, 0.0).expect("fixed valid parameters");
    let res = trimmed_sum(ctx, &reciprocal, x, n, b_n + 1)?;
    let s_light = if res.removed_values.is_empty() {
        res.total
    } else {
        res.total - res.removed_values[0]
    };
    let s_deep = res.trimmed;
    let measured_gap = s_light - s_deep;

    let cluster = cluster_gap_bound(ctx, x, n, 1)?;
    let half_n_log_n = 0.5 * n as f64 * (n as f64).ln();

    let mut gate_reason = None;
    if !hypothesis_met {
        gate_reason = Some(format!(
            "closeness hypothesis not met: x_min = {} is not below {hypothesis_threshold:e}",
            rat_to_f64(&min_pos)
        ));
    } else if b_n < 2 {
        gate_reason = Some(format!(
            "window count b = {b_n} is degenerate; the spread needs at least two windows"
        ));
    }
    let verdict = gate_reason.is_none().then(|| le_slack(half_n_log_n, measured_gap));

    Ok(PointOscReport {
        schema: POINT_OSC_SCHEMA.into(),
        angle: ctx.stream().label().to_string(),
        angle_fingerprint: ctx.fingerprint(),
        level,
        q_level: q_int.to_string(),
        q_next: q_next.to_string(),
        psi,
        psi_value,
        n_rule: n_rule.into(),
        n,
        b_n,
        x: x.to_string(),
        x_min: min_pos.to_string(),
        hypothesis_threshold,
        hypothesis_met,
        gate_reason,
        s_light,
        s_deep,
        measured_gap,
        harmonic_bound: Some(cluster.harmonic_bound),
        harmonic_verdict: cluster.verdict,
        half_n_log_n,
        verdict,
        evals_estimate: estimate,
        budget,
        wall_clock_ms: elapsed_ms(start),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contfrac::CoefficientStream;
    use crate::experiments::report::ReplayReport;
    use crate::Int;
    use num_traits::One;

    /// q_3 = 10^4 with a huge next digit, so q_4 = 6 * 10^6 + 1 and the
    /// level-3 cluster dominates the sum.
    fn probe_ctx() -> RotationContext {
        let pre: Vec<Int> = [1, 9999, 600].into_iter().map(Int::from).collect();
        let mut s = CoefficientStream::from_periodic(pre, vec![Int::one()]).unwrap();
        RotationContext::make_context(&mut s, 1_500_000, 1 << 10).unwrap()
    }

    #[test]
    fn fast_approach_point_clears_the_half_scale_bound() {
        let ctx = probe_ctx();
        // Starting point below the level-4 remainder: its own position is
        // the cluster seed, so the chain starts at orbit index 0.
        let x = Rat::new(Int::one(), Int::from(12_000_000));
        let rep = point_osc(&ctx, 3, &x, &PointOscConfig::default()).unwrap();
        assert_eq!(rep.q_level, "10000");
        assert_eq!(rep.n_rule, "generalized-scale");
        assert!(rep.hypothesis_met, "x_min = {} vs {}", rep.x_min, rep.hypothesis_threshold);
        assert!(rep.b_n >= 2);
        assert_eq!(rep.verdict, Some(true), "gap {} vs {}", rep.measured_gap, rep.half_n_log_n);
        assert!(rep.measured_gap > rep.half_n_log_n);
        assert_eq!(rep.harmonic_verdict, Some(true));
        assert!(rep.gate_reason.is_none());
        // Deterministic bytes.
        let rep2 = point_osc(&ctx, 3, &x, &PointOscConfig::default()).unwrap();
        assert_eq!(rep.canonical_json().unwrap(), rep2.canonical_json().unwrap());
    }

    #[test]
    fn generic_point_fails_the_hypothesis_and_gets_no_verdict() {
        let ctx = probe_ctx();
        let x = Rat::new(Int::one(), Int::from(3));
        let rep = point_osc(&ctx, 3, &x, &PointOscConfig::default()).unwrap();
        assert!(!rep.hypothesis_met);
        assert!(rep.verdict.is_none());
        assert!(rep.gate_reason.as_deref().unwrap().contains("hypothesis"));
        // The measurements are still reported.
        assert!(rep.measured_gap.is_finite());
    }

    #[test]
    fn degenerate_window_count_is_report_only() {
        let ctx = probe_ctx();
        let x = Rat::new(Int::one(), Int::from(12_000_000));
        let cfg = PointOscConfig {
            n_override: Some(19_999), // b = 1
            ..PointOscConfig::default()
        };
        let rep = point_osc(&ctx, 3, &x, &cfg).unwrap();
        assert_eq!(rep.n_rule, "explicit");
        assert_eq!(rep.b_n, 1);
        assert!(rep.verdict.is_none());
        assert!(rep.gate_reason.as_deref().unwrap().contains("degenerate"));
    }

    #[test]
    fn literal_gauge_rejects_reachable_denominators() {
        let ctx = probe_ctx();
        let x = Rat::new(Int::one(), Int::from(3));
        let cfg = PointOscConfig { psi_iterates: 5, ..PointOscConfig::default() };
        let err = point_osc(&ctx, 3, &x, &cfg).unwrap_err();
        assert!(
            matches!(err, Error::Domain(_) | Error::Precondition(_)),
            "unexpected error {err}"
        );
    }

    #[test]
    fn budget_gate_fires_before_work() {
        let ctx = probe_ctx();
        let x = Rat::new(Int::one(), Int::from(3));
        let cfg = PointOscConfig { budget: Some(1000), ..PointOscConfig::default() };
        let err = point_osc(&ctx, 3, &x, &cfg).unwrap_err();
        assert!(matches!(err, Error::Budget(_)));
    }
}
