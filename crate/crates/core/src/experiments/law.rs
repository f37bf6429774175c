//! Strong- and weak-law sweeps: trimmed-sum ratios over a deterministic
//! stratified sample of starting points, along an increasing grid of orbit
//! lengths, with empirical violation measures at each tolerance.
//!
//! A *strong-law* run asks whether `S_N^{k(N)}(f)(x) / d_N -> 1` pointwise:
//! the headline statistic is the per-length maximum of `|ratio - 1|` over
//! the sample. A *weak-law* run asks for convergence in measure: the
//! headline statistic is `lambda_hat(N, eps)`, the fraction of sampled
//! points violating `|ratio - 1| <= eps`. Both kinds compute both
//! statistics; the `kind` tag records the question being asked.

use std::fmt;
use std::time::Instant;

use crate::diophantine::trimming::TrimmingSequence;
use crate::error::{Error, Result};
use crate::observables::{Normalizer, PowerObservable};
use crate::orbit::{stratified_points, RotationContext, SAMPLER_SEED};
use crate::trimsum::trimmed_profile;

use super::report::{LawReport, LawRow, SampleDesign, ViolationCell, LAW_SCHEMA};
use super::{effective_budget, elapsed_ms, ensure_budget};

/// Default tolerance ladder for violation measures.
pub const DEFAULT_EPSILONS: [f64; 4] = [0.5, 0.25, 0.1, 0.05];

/// Normalizing scale `d(N, k)` applied to each trimmed sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScaleSpec {
    /// `N ln N` — the reciprocal-singularity scale.
    NLogN,
    /// `N^beta k^(1-beta) / (beta - 1)` — the power-singularity scale.
    PowerScale(f64),
    /// A fixed constant; diagnostic only.
    Constant(f64),
    /// Each sum divided by itself: every ratio is exactly `1`, which pins
    /// down the plumbing (sampling, grids, reporting) independently of any
    /// convergence question.
    SelfNormalized,
}

impl fmt::Display for ScaleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScaleSpec::NLogN => write!(f, "n-log-n"),
            ScaleSpec::PowerScale(beta) => write!(f, "power-scale:beta={beta}"),
            ScaleSpec::Constant(c) => write!(f, "constant:{c}"),
            ScaleSpec::SelfNormalized => write!(f, "self-normalized"),
        }
    }
}

/// Configuration shared by strong- and weak-law runs.
#[derive(Clone, Debug)]
pub struct LawConfig {
    /// Strictly increasing orbit lengths.
    pub n_grid: Vec<u64>,
    /// Number of stratified starting points.
    pub sample_count: u64,
    /// Seed for the stratified jitter.
    pub seed: u64,
    /// Tolerances for the violation measures; positive, `inf` allowed as an
    /// "always satisfied" sentinel.
    pub epsilons: Vec<f64>,
    /// Explicit budget override; `None` defers to the environment/default.
    pub budget: Option<u64>,
}

impl LawConfig {
    /// A config with the default sample design (1000 points, library seed,
    /// default tolerance ladder).
    pub fn new(n_grid: Vec<u64>) -> Self {
        Self {
            n_grid,
            sample_count: 1000,
            seed: SAMPLER_SEED,
            epsilons: DEFAULT_EPSILONS.to_vec(),
            budget: None,
        }
    }
}

/// Runs a strong-law sweep (pointwise reading; see module docs).
pub fn strong_law_run(
    ctx: &RotationContext,
    obs: &PowerObservable<f64>,
    trim: &TrimmingSequence,
    scale: ScaleSpec,
    cfg: &LawConfig,
) -> Result<LawReport> {
    law_run("strong", ctx, obs, trim, scale, cfg)
}

/// Runs a weak-law sweep (in-measure reading; see module docs).
pub fn weak_law_run(
    ctx: &RotationContext,
    obs: &PowerObservable<f64>,
    trim: &TrimmingSequence,
    scale: ScaleSpec,
    cfg: &LawConfig,
) -> Result<LawReport> {
    law_run("weak", ctx, obs, trim, scale, cfg)
}

fn law_run(
    kind: &str,
    ctx: &RotationContext,
    obs: &PowerObservable<f64>,
    trim: &TrimmingSequence,
    scale: ScaleSpec,
    cfg: &LawConfig,
) -> Result<LawReport> {
    let start = Instant::now();
    validate_grid(ctx, &cfg.n_grid)?;
    validate_epsilons(&cfg.epsilons)?;
    if cfg.sample_count == 0 {
        return Err(Error::Validation("law run needs at least one starting point".into()));
    }

    // Work estimate: one streamed orbit pass per starting point costs the
    // largest grid length; summing the whole grid is a safe upper bound and
    // the advertised contract.
    let grid_cost: u64 = cfg
        .n_grid
        .iter()
        .try_fold(0u64, |acc, &n| acc.checked_add(n))
        .ok_or_else(|| Error::Range("length grid sum overflows u64".into()))?;
    let estimate = cfg
        .sample_count
        .checked_mul(grid_cost)
        .ok_or_else(|| Error::Range("evaluation estimate overflows u64".into()))?;
    let budget = effective_budget(cfg.budget)?;
    ensure_budget(estimate, budget)?;

    let points = stratified_points(ctx, cfg.sample_count, cfg.seed)?;
    let scale_fn = make_scale_fn(scale);

    // profiles[s][g] = ratio of sample s at grid index g.
    let mut profiles: Vec<Vec<(u64, f64, f64)>> = Vec::with_capacity(points.len());
    for x in &points {
        let rows = trimmed_profile(ctx, obs, x, &cfg.n_grid, trim, scale_fn.as_ref())?;
        let per_x = match scale {
            ScaleSpec::SelfNormalized => rows
                .iter()
                .map(|r| {
                    let ratio = if r.trimmed == 0.0 { 1.0 } else { r.trimmed / r.trimmed };
                    (r.k, f64::NAN, ratio)
                })
                .collect(),
            _ => rows.iter().map(|r| (r.k, r.scale, r.ratio)).collect(),
        };
        profiles.push(per_x);
    }

    let mut rows = Vec::with_capacity(cfg.n_grid.len());
    for (g, &n) in cfg.n_grid.iter().enumerate() {
        let k = profiles[0][g].0;
        let d = match scale {
            ScaleSpec::SelfNormalized => None,
            _ => Some(profiles[0][g].1),
        };
        let ratios: Vec<f64> = profiles.iter().map(|p| p[g].2).collect();
        let max_abs_dev =
            ratios.iter().map(|r| (r - 1.0).abs()).fold(0.0_f64, f64::max);
        let violation_measures = cfg
            .epsilons
            .iter()
            .map(|&eps| {
                let violations = ratios.iter().filter(|r| (*r - 1.0).abs() > eps).count();
                ViolationCell {
                    epsilon: eps,
                    lambda_hat: violations as f64 / ratios.len() as f64,
                }
            })
            .collect();
        rows.push(LawRow { n, k, d, ratios, max_abs_dev, violation_measures });
    }

    Ok(LawReport {
        schema: LAW_SCHEMA.into(),
        kind: kind.into(),
        angle: ctx.stream().label().to_string(),
        angle_fingerprint: ctx.fingerprint(),
        observable: format!(
            "pow:beta={},c1={},c2={}",
            obs.beta(),
            obs.c1(),
            obs.c2()
        ),
        trimming: trim.to_string(),
        scale: scale.to_string(),
        n_grid: cfg.n_grid.clone(),
        epsilons: cfg.epsilons.clone(),
        sample: SampleDesign {
            grid_size: cfg.sample_count,
            seed: cfg.seed,
            points: points.iter().map(|p| p.to_string()).collect(),
        },
        rows,
        evals_estimate: estimate,
        budget,
        wall_clock_ms: elapsed_ms(start),
    })
}

fn validate_grid(ctx: &RotationContext, grid: &[u64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Validation("length grid must be nonempty".into()));
    }
    if grid[0] == 0 {
        return Err(Error::Domain("orbit length must be >= 1".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation("length grid must be strictly increasing".into()));
    }
    let last = *grid.last().expect("nonempty");
    if last > ctx.max_valid_n() {
        return Err(Error::Range(format!(
            "grid length {last} exceeds the certified range {} of this context",
            ctx.max_valid_n()
        )));
    }
    Ok(())
}

fn validate_epsilons(eps: &[f64]) -> Result<()> {
    if eps.is_empty() {
        return Err(Error::Validation("tolerance list must be nonempty".into()));
    }
    for &e in eps {
        if e.is_nan() || e <= 0.0 {
            return Err(Error::Domain(format!(
                "tolerances must be positive (infinity allowed), got {e}"
            )));
        }
    }
    Ok(())
}

fn make_scale_fn(scale: ScaleSpec) -> Box<dyn Fn(u64, u64) -> Result<f64>> {
    match scale {
        // The profile divides by this placeholder; self-normalized ratios
        // are recomputed afterwards, so any positive constant works.
        ScaleSpec::SelfNormalized => Box::new(|_, _| Ok(1.0)),
        ScaleSpec::Constant(c) => {
            let norm = Normalizer::Constant(c);
            Box::new(move |n, k| norm.value(n, k))
        }
        ScaleSpec::NLogN => Box::new(|n, k| Normalizer::NLogN.value(n, k)),
        ScaleSpec::PowerScale(beta) => {
            let norm = Normalizer::PowerScale(beta);
            Box::new(move |n, k| norm.value(n, k))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contfrac::CoefficientStream;
    use crate::experiments::report::ReplayReport;
    use crate::orbit::RotationContext;
    use num_traits::One;

    fn golden_ctx(budget: u64) -> RotationContext {
        let mut stream =
            CoefficientStream::from_periodic(vec![], vec![crate::Int::one()]).unwrap();
        RotationContext::make_context(&mut stream, budget, 1 << 10).unwrap()
    }

    fn reciprocal() -> PowerObservable<f64> {
        PowerObservable::new(1.0, 1.0, 0.0).unwrap()
    }

    fn small_cfg() -> LawConfig {
        LawConfig {
            n_grid: vec![50, 200],
            sample_count: 8,
            seed: 99,
            epsilons: vec![0.5, f64::INFINITY],
            budget: Some(10_000),
        }
    }

    #[test]
    fn self_normalized_ratios_are_exactly_one_and_runs_are_deterministic() {
        let ctx = golden_ctx(400);
        let obs = reciprocal();
        let trim = TrimmingSequence::constant(1);
        let cfg = small_cfg();
        let a = strong_law_run(&ctx, &obs, &trim, ScaleSpec::SelfNormalized, &cfg).unwrap();
        assert_eq!(a.kind, "strong");
        assert_eq!(a.rows.len(), 2);
        for row in &a.rows {
            assert!(row.d.is_none());
            assert_eq!(row.ratios.len(), 8);
            assert!(row.ratios.iter().all(|&r| r == 1.0));
            assert_eq!(row.max_abs_dev, 0.0);
            for cell in &row.violation_measures {
                assert_eq!(cell.lambda_hat, 0.0);
            }
        }
        let b = strong_law_run(&ctx, &obs, &trim, ScaleSpec::SelfNormalized, &cfg).unwrap();
        assert_eq!(a.canonical_json().unwrap(), b.canonical_json().unwrap());
    }

    #[test]
    fn constant_scale_pushes_every_ratio_into_violation() {
        let ctx = golden_ctx(400);
        let obs = reciprocal();
        let trim = TrimmingSequence::constant(1);
        let mut cfg = small_cfg();
        cfg.n_grid = vec![50];
        cfg.epsilons = vec![0.5];
        // S_50^1(1/x) is in the hundreds; dividing by 10^9 leaves ratios
        // near zero, so |ratio - 1| > 0.5 for every sample.
        let rep = weak_law_run(&ctx, &obs, &trim, ScaleSpec::Constant(1e9), &cfg).unwrap();
        assert_eq!(rep.kind, "weak");
        let row = &rep.rows[0];
        assert_eq!(row.d, Some(1e9));
        assert_eq!(row.violation_measures[0].lambda_hat, 1.0);
        assert!(row.max_abs_dev > 0.5);
    }

    #[test]
    fn infinity_tolerance_never_registers_violations() {
        let ctx = golden_ctx(400);
        let rep = weak_law_run(
            &ctx,
            &reciprocal(),
            &TrimmingSequence::constant(1),
            ScaleSpec::Constant(1e9),
            &small_cfg(),
        )
        .unwrap();
        for row in &rep.rows {
            let inf_cell = row
                .violation_measures
                .iter()
                .find(|c| c.epsilon.is_infinite())
                .unwrap();
            assert_eq!(inf_cell.lambda_hat, 0.0);
        }
    }

    #[test]
    fn rejects_bad_grids_tolerances_and_sample_counts() {
        let ctx = golden_ctx(400);
        let obs = reciprocal();
        let trim = TrimmingSequence::constant(1);
        let base = small_cfg();

        let mut cfg = base.clone();
        cfg.n_grid = vec![];
        assert!(strong_law_run(&ctx, &obs, &trim, ScaleSpec::NLogN, &cfg).is_err());

        cfg = base.clone();
        cfg.n_grid = vec![50, 50];
        assert!(strong_law_run(&ctx, &obs, &trim, ScaleSpec::NLogN, &cfg).is_err());

        cfg = base.clone();
        cfg.n_grid = vec![50, u64::MAX];
        assert!(matches!(
            strong_law_run(&ctx, &obs, &trim, ScaleSpec::NLogN, &cfg),
            Err(Error::Range(_))
        ));

        cfg = base.clone();
        cfg.epsilons = vec![0.5, -0.1];
        assert!(strong_law_run(&ctx, &obs, &trim, ScaleSpec::NLogN, &cfg).is_err());

        cfg = base.clone();
        cfg.epsilons = vec![f64::NAN];
        assert!(strong_law_run(&ctx, &obs, &trim, ScaleSpec::NLogN, &cfg).is_err());

        cfg = base.clone();
        cfg.sample_count = 0;
        assert!(strong_law_run(&ctx, &obs, &trim, ScaleSpec::NLogN, &cfg).is_err());
    }

    #[test]
    fn budget_error_fires_before_any_work() {
        let ctx = golden_ctx(400);
        let mut cfg = small_cfg();
        cfg.budget = Some(100); // estimate is 8 * (50 + 200) = 2000
        let err = strong_law_run(
            &ctx,
            &reciprocal(),
            &TrimmingSequence::constant(1),
            ScaleSpec::NLogN,
            &cfg,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Budget(_)));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn golden_reciprocal_ratio_is_near_one_at_moderate_length() {
        // Not a convergence assertion, just a sanity anchor: at N = 10^4 on
        // the golden rotation the once-trimmed reciprocal sum over N ln N
        // should sit within a factor of two of 1 for most points.
        let ctx = golden_ctx(20_000);
        let mut cfg = small_cfg();
        cfg.n_grid = vec![10_000];
        cfg.budget = Some(100_000);
        let rep = strong_law_run(
            &ctx,
            &reciprocal(),
            &TrimmingSequence::constant(1),
            ScaleSpec::NLogN,
            &cfg,
        )
        .unwrap();
        let row = &rep.rows[0];
        assert!(row.max_abs_dev < 1.0, "max deviation {}", row.max_abs_dev);
        assert!(row.d.unwrap() > 0.0);
    }
}
