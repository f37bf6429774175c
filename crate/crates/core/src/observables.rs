//! The power-singular observable family, its truncations with closed-form
//! integrals and variations, tail measures, and the normalizing sequences
//! used by the limit-law experiments.
//!
//! The observable is `f(x) = c1 * x^(-beta) + c2 * (1-x)^(-beta)` on `(0,1)`
//! with `f(0) = 0` by convention.  Its singular ends carry infinite mass, so
//! plain Birkhoff sums have no law of large numbers; the trimmed experiments
//! divide by the scales defined at the bottom of this module.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::diophantine::TrimmingSequence;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::util::ln_rat;
use crate::{Int, Rat};

/// Exclusion band above 1 for the exponent: `beta` strictly inside
/// `(1, 1 + MIN_BETA_GAP)` is rejected because the `1/(beta - 1)` factor of
/// the power-law scale is numerically meaningless that close to the
/// logarithmic regime.
pub const MIN_BETA_GAP: f64 = 1e-6;

/// `f(x) = c1 * x^(-beta) + c2 * (1 - x)^(-beta)`, `f(0) = 0`.
///
/// Requires `beta >= 1` (outside the exclusion band), `c1 > 0`, `c2 >= 0`.
/// The one-sided case `c2 = 0` is the default throughout the experiments;
/// `c2 > 0` adds a mirrored singularity at `1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerObservable<R: Real> {
    beta: R,
    c1: R,
    c2: R,
}

impl<R: Real> PowerObservable<R> {
    pub fn new(beta: R, c1: R, c2: R) -> Result<Self> {
        let b = beta.to_f64().unwrap_or(f64::NAN);
        if !b.is_finite() || b < 1.0 {
            return Err(Error::Domain(format!("exponent beta must be >= 1, got {beta}")));
        }
        if b > 1.0 && b < 1.0 + MIN_BETA_GAP {
            return Err(Error::Domain(format!(
                "beta = {beta} is inside the exclusion band (1, 1 + {MIN_BETA_GAP}); \
                 the 1/(beta - 1) scale factor is meaningless that close to 1"
            )));
        }
        let c1f = c1.to_f64().unwrap_or(f64::NAN);
        if !(c1f > 0.0) || !c1f.is_finite() {
            return Err(Error::Domain(format!("coefficient c1 must be > 0, got {c1}")));
        }
        let c2f = c2.to_f64().unwrap_or(f64::NAN);
        if !(c2f >= 0.0) || !c2f.is_finite() {
            return Err(Error::Domain(format!("coefficient c2 must be >= 0, got {c2}")));
        }
        Ok(PowerObservable { beta, c1, c2 })
    }

    pub fn beta(&self) -> R {
        self.beta
    }

    pub fn c1(&self) -> R {
        self.c1
    }

    pub fn c2(&self) -> R {
        self.c2
    }

    /// Whether both ends of the interval are singular.
    pub fn two_sided(&self) -> bool {
        self.c2 > R::zero()
    }

    fn beta_f(&self) -> f64 {
        self.beta.to_f64().expect("validated finite")
    }

    fn c1_f(&self) -> f64 {
        self.c1.to_f64().expect("validated finite")
    }

    fn c2_f(&self) -> f64 {
        self.c2.to_f64().expect("validated finite")
    }

    /// Value at an exact point of `[0, 1)`.  The fraction is taken to log
    /// space exactly (valid far beyond the `f64` range, where magnitudes
    /// saturate to infinity honestly) and rounded once at the end.
    pub fn eval(&self, p: &Rat) -> R {
        debug_assert!(!p.is_negative() && p < &Rat::one(), "position must be in [0, 1)");
        if p.is_zero() {
            return R::zero();
        }
        let b = self.beta_f();
        let mut v = self.c1_f() * (-b * ln_rat(p)).exp();
        if self.two_sided() {
            let mirror = Rat::one() - p;
            v += self.c2_f() * (-b * ln_rat(&mirror)).exp();
        }
        R::from_f64_lossy(v)
    }

    /// Value at a plain float position: the fast path for streaming sums
    /// after an exact grid position has been rounded once.  `x <= 0` maps to
    /// `0` (the `f(0) = 0` convention survives the rounding).
    pub fn eval_f64(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let b = self.beta_f();
        let mut v = self.c1_f() * x.powf(-b);
        if self.two_sided() {
            v += self.c2_f() * (1.0 - x).powf(-b);
        }
        v
    }

    /// Streaming-path value with `x` and `1 - x` supplied separately, both
    /// already rounded from exact residues.  Avoids the cancellation of
    /// `1.0 - x` for points very close to 1; `x = 0` keeps the `f(0) = 0`
    /// convention.
    pub fn eval_split_f64(&self, x: f64, one_minus_x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let b = self.beta_f();
        let mut v = self.c1_f() * x.powf(-b);
        if self.two_sided() {
            v += self.c2_f() * one_minus_x.powf(-b);
        }
        v
    }

    /// Streaming-path value from `ln x` and `ln (1 - x)`, for grids whose
    /// denominator overflows `f64` so the positions themselves would round to
    /// `0`.  Magnitudes beyond the float range saturate to infinity.
    pub fn eval_from_logs(&self, ln_x: f64, ln_one_minus_x: f64) -> f64 {
        let b = self.beta_f();
        let mut v = self.c1_f() * (-b * ln_x).exp();
        if self.two_sided() {
            v += self.c2_f() * (-b * ln_one_minus_x).exp();
        }
        v
    }

    /// Location of the interior minimum when both ends are singular:
    /// `x* = c1^e / (c1^e + c2^e)` with `e = 1/(beta + 1)`.  `None` in the
    /// one-sided case (the function is strictly decreasing there).
    pub fn interior_min(&self) -> Option<f64> {
        if !self.two_sided() {
            return None;
        }
        let e = 1.0 / (self.beta_f() + 1.0);
        let a = self.c1_f().powf(e);
        let b = self.c2_f().powf(e);
        Some(a / (a + b))
    }

    /// Lebesgue measure of the super-level set `{ f > s }`.
    ///
    /// One-sided: `min(1, (c1/s)^(1/beta))` in closed form.  Two-sided: the
    /// set is a union of one piece per singular end, resolved by bisection on
    /// the two monotone branches around the interior minimum.
    pub fn tail_measure(&self, s: R) -> R {
        let s = s.to_f64().unwrap_or(f64::NAN);
        if !(s > 0.0) {
            return R::one(); // f > 0 everywhere on (0, 1)
        }
        let b = self.beta_f();
        if !self.two_sided() {
            return R::from_f64_lossy((self.c1_f() / s).powf(1.0 / b).min(1.0));
        }
        let xstar = self.interior_min().expect("two-sided");
        if self.eval_f64(xstar) >= s {
            return R::one();
        }
        let left = self.bisect_level(s, 0.0, xstar, true);
        let right = self.bisect_level(s, xstar, 1.0, false);
        R::from_f64_lossy(left + (1.0 - right))
    }

    /// Root of `f(x) = s` on a branch where `f` is monotone; `decreasing`
    /// selects the branch left of the interior minimum.  The interval ends
    /// themselves are never evaluated, so the singularities (and the
    /// `f(0) = 0` convention) cannot disturb the bracket.
    fn bisect_level(&self, s: f64, mut lo: f64, mut hi: f64, decreasing: bool) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let above = self.eval_f64(mid) > s;
            if above == decreasing {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Restricts the observable to `[t, 1)` (one-sided) or `[t, 1-t]`
    /// (two-sided), zero elsewhere.  Requires `t` in `(0, 1)`; the two-sided
    /// case additionally needs `t < 1/2` so the support is nonempty.
    pub fn truncate(&self, t: &Rat) -> Result<TruncatedObservable<R>> {
        if t <= &Rat::zero() || t >= &Rat::one() {
            return Err(Error::Domain(format!("truncation threshold must be in (0, 1), got {t}")));
        }
        if self.two_sided() && t * Rat::from(Int::from(2)) >= Rat::one() {
            return Err(Error::Domain(format!(
                "two-sided truncation needs t < 1/2 for a nonempty support, got {t}"
            )));
        }
        Ok(TruncatedObservable { base: *self, threshold: t.clone() })
    }
}

impl<R: Real> fmt::Display for PowerObservable<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pow:beta={},c1={},c2={}", self.beta, self.c1, self.c2)
    }
}

/// Grammar: `pow:beta=<b>,c1=<v>,c2=<v>` (`c2` optional, default `0`).
impl FromStr for PowerObservable<f64> {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let body = text.strip_prefix("pow:").ok_or_else(|| {
            Error::Parse(format!("observable needs 'pow:beta=<b>,c1=<v>[,c2=<v>]', got {text:?}"))
        })?;
        let (mut beta, mut c1, mut c2) = (None, None, 0.0f64);
        for part in body.split(',') {
            let (key, val) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("observable field needs 'key=value', got {part:?}")))?;
            let v: f64 = val
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("bad observable value {val:?}: {e}")))?;
            match key.trim() {
                "beta" => beta = Some(v),
                "c1" => c1 = Some(v),
                "c2" => c2 = v,
                other => return Err(Error::Parse(format!("unknown observable field {other:?}"))),
            }
        }
        let beta = beta.ok_or_else(|| Error::Parse("observable is missing beta".into()))?;
        let c1 = c1.ok_or_else(|| Error::Parse("observable is missing c1".into()))?;
        PowerObservable::new(beta, c1, c2)
    }
}

/// A power observable restricted to its truncation support, with closed-form
/// integral and total variation.  The threshold stays an exact rational so
/// thresholds like `1/(q_n + q_{n-1})` survive far beyond the float range.
#[derive(Clone, Debug)]
pub struct TruncatedObservable<R: Real> {
    base: PowerObservable<R>,
    threshold: Rat,
}

impl<R: Real> TruncatedObservable<R> {
    pub fn base(&self) -> &PowerObservable<R> {
        &self.base
    }

    pub fn threshold(&self) -> &Rat {
        &self.threshold
    }

    /// Right end of the support: `1` (half-open) one-sided, `1 - t` (closed)
    /// two-sided.
    pub fn support_end(&self) -> Rat {
        if self.base.two_sided() {
            Rat::one() - &self.threshold
        } else {
            Rat::one()
        }
    }

    /// Value at an exact point: the base observable on the support, `0`
    /// outside it.
    pub fn eval(&self, p: &Rat) -> R {
        debug_assert!(!p.is_negative() && p < &Rat::one(), "position must be in [0, 1)");
        if p < &self.threshold {
            return R::zero();
        }
        if self.base.two_sided() && *p > self.support_end() {
            return R::zero();
        }
        self.base.eval(p)
    }

    /// Exact-threshold integral over the support, in closed form.
    ///
    /// Both terms of the base observable integrate to the same
    /// `J = int_t^end x^(-beta) dx` (the mirror substitution maps the
    /// two-sided support onto itself), so the integral is `(c1 + c2) * J`
    /// with `J = ln(end/t)` at `beta = 1` and
    /// `(t^(1-beta) - end^(1-beta)) / (beta - 1)` above it.
    pub fn integral(&self) -> R {
        let b = self.base.beta_f();
        let lt = ln_rat(&self.threshold);
        let lend = if self.base.two_sided() { ln_rat(&self.support_end()) } else { 0.0 };
        let j = if b == 1.0 {
            lend - lt
        } else {
            (((1.0 - b) * lt).exp() - ((1.0 - b) * lend).exp()) / (b - 1.0)
        };
        R::from_f64_lossy((self.base.c1_f() + self.base.c2_f()) * j)
    }

    /// Total variation over `[0, 1)` (no wrap-around identification).
    ///
    /// One-sided, the function jumps up by `f(t)` and then decreases to the
    /// limit `c1` at `1`, so `Var = 2 f(t) - c1`.  Two-sided there are edge
    /// jumps at both `t` and `1 - t` and an interior minimum in between, so
    /// `Var = 2 f(t) + 2 f(1-t) - 2 f(m)` with `m` the minimum location
    /// clamped to the support (an off-support minimum leaves a single
    /// monotone piece and the formula degrades correctly).
    pub fn variation(&self) -> R {
        let ft = raw_value_f64(&self.base, &self.threshold);
        if !self.base.two_sided() {
            return R::from_f64_lossy(2.0 * ft - self.base.c1_f());
        }
        let end = self.support_end();
        let fe = raw_value_f64(&self.base, &end);
        let xstar = self.base.interior_min().expect("two-sided");
        let m = Rat::from_float(xstar)
            .map(|x| x.clamp(self.threshold.clone(), end))
            .unwrap_or_else(|| self.threshold.clone());
        let fm = raw_value_f64(&self.base, &m);
        R::from_f64_lossy(2.0 * (ft + fe - fm))
    }
}

/// `f64` value of the base observable at an exact positive point (log-space
/// path, no zero convention involved).
fn raw_value_f64<R: Real>(obs: &PowerObservable<R>, p: &Rat) -> f64 {
    let b = obs.beta_f();
    let mut v = obs.c1_f() * (-b * ln_rat(p)).exp();
    if obs.two_sided() {
        let mirror = Rat::one() - p;
        v += obs.c2_f() * (-b * ln_rat(&mirror)).exp();
    }
    v
}

/// Sum scale `d_N = N ln N` for the logarithmic case `beta = 1` with light
/// trimming.  Meaningful for `N >= 2`.
pub fn normalizer_1x<R: Real>(n: u64) -> R {
    debug_assert!(n >= 2, "the N ln N scale needs N >= 2");
    let nf = n as f64;
    R::from_f64_lossy(nf * nf.ln())
}

/// Sum scale `d_N = N^beta k^(1-beta) / (beta - 1)` for `beta > 1` with `k`
/// terms trimmed.  `beta = 1` is rejected explicitly (its scale is `N ln N`),
/// as is `k` outside `1..=N`.
pub fn normalizer_beta<R: Real>(n: u64, k: u64, beta: R) -> Result<R> {
    let b = beta.to_f64().unwrap_or(f64::NAN);
    if b == 1.0 {
        return Err(Error::Domain(
            "beta = 1 scales as N ln N (normalizer_1x); the power-law scale needs beta > 1".into(),
        ));
    }
    if !(b > 1.0) || !b.is_finite() {
        return Err(Error::Domain(format!("power-law scale needs beta > 1, got {beta}")));
    }
    if k == 0 || k > n {
        return Err(Error::Validation(format!(
            "trimming count must satisfy 1 <= k <= N, got k = {k}, N = {n}"
        )));
    }
    let log_val = b * (n as f64).ln() + (1.0 - b) * (k as f64).ln();
    Ok(R::from_f64_lossy(log_val.exp() / (b - 1.0)))
}

/// Selector for the normalizing sequence `d_N` used by law experiments and
/// the tail condition below.
#[derive(Clone, Copy, Debug)]
pub enum Normalizer<R: Real> {
    /// A fixed scale; only useful as a diagnostic/guard case.
    Constant(R),
    /// `N ln N`.
    NLogN,
    /// `N^beta k^(1-beta) / (beta - 1)` with the given `beta`.
    PowerScale(R),
}

impl<R: Real> Normalizer<R> {
    pub fn value(&self, n: u64, k: u64) -> Result<R> {
        match self {
            Normalizer::Constant(c) => Ok(*c),
            Normalizer::NLogN => {
                if n < 2 {
                    return Err(Error::Domain(format!("the N ln N scale needs N >= 2, got {n}")));
                }
                Ok(normalizer_1x(n))
            }
            Normalizer::PowerScale(beta) => normalizer_beta(n, k, *beta),
        }
    }
}

/// One scaled-tail trajectory: `N * lambda(f > c * d_N / k(N))` along an
/// increasing grid of `N`, for one constant `c`.
#[derive(Clone, Debug)]
pub struct TailConditionTrajectory<R: Real> {
    pub c: R,
    pub n_values: Vec<u64>,
    pub scaled_measures: Vec<R>,
    /// Verdict "decays on this range": the final value is (within rounding)
    /// the trajectory minimum and at most half the initial value.  A crude
    /// but monotone-robust criterion; a `false` on a short range means "no
    /// clear decay here", not a proof of divergence.
    pub decays: bool,
}

/// Integrability surrogate behind untrimmed weak laws: if a trimmed law
/// holds and, for every `c > 0`, the mass of the region where a single term
/// exceeds `c * d_N / k(N)` vanishes faster than `1/N`, the trimming can be
/// removed.  This evaluates `N * lambda(f > c * d_N / k(N))` on a grid of
/// `N` for each `c` and attaches a decay verdict per trajectory.
pub fn tail_condition_check<R: Real>(
    obs: &PowerObservable<R>,
    trim: &TrimmingSequence,
    scale: &Normalizer<R>,
    n_values: &[u64],
    c_list: &[R],
) -> Result<Vec<TailConditionTrajectory<R>>> {
    if n_values.len() < 2 {
        return Err(Error::Validation("tail condition needs at least two N values".into()));
    }
    if n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation("tail condition N grid must be strictly increasing".into()));
    }
    if c_list.is_empty() {
        return Err(Error::Validation("tail condition needs at least one constant c".into()));
    }
    let mut out = Vec::with_capacity(c_list.len());
    for &c in c_list {
        if !(c.to_f64().unwrap_or(f64::NAN) > 0.0) {
            return Err(Error::Validation(format!("tail condition constants must be > 0, got {c}")));
        }
        let mut scaled = Vec::with_capacity(n_values.len());
        for &n in n_values {
            let k_int = trim.k(&Int::from(n))?;
            let k = k_int
                .to_u64()
                .ok_or_else(|| Error::Range(format!("trimming count k({n}) = {k_int} exceeds u64")))?;
            if k == 0 {
                return Err(Error::Validation(format!(
                    "tail condition needs k(N) >= 1 on the whole grid; k({n}) = 0"
                )));
            }
            let d = scale.value(n, k)?;
            let level = c * d / R::from_f64_lossy(k as f64);
            scaled.push(R::from_f64_lossy(n as f64) * obs.tail_measure(level));
        }
        let vals: Vec<f64> = scaled.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
        let first = vals[0];
        let last = *vals.last().expect("nonempty");
        let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let decays = last <= min * (1.0 + 1e-9) && last < 0.5 * first;
        out.push(TailConditionTrajectory { c, n_values: n_values.to_vec(), scaled_measures: scaled, decays });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::SplitMix64;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(Int::from(n), Int::from(d))
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    fn one_sided(beta: f64, c1: f64) -> PowerObservable<f64> {
        PowerObservable::new(beta, c1, 0.0).unwrap()
    }

    #[test]
    fn eval_matches_closed_forms() {
        let f = one_sided(1.0, 1.0);
        assert!(close(f.eval(&rat(1, 10)), 10.0, 1e-12));
        assert_eq!(f.eval(&Rat::zero()), 0.0);
        let g = one_sided(2.0, 1.0);
        assert!(close(g.eval(&rat(3, 10)), 100.0 / 9.0, 1e-12));
        let two = PowerObservable::new(1.0, 1.0, 1.0).unwrap();
        assert!(close(two.eval(&rat(1, 4)), 4.0 + 4.0 / 3.0, 1e-12));
        assert!(close(two.eval_f64(0.25), 4.0 + 4.0 / 3.0, 1e-12));
    }

    #[test]
    fn eval_survives_fractions_beyond_float_range() {
        let tiny = Rat::new(Int::one(), Int::from(10).pow(400));
        let f = one_sided(1.0, 1.0);
        let v: f64 = f.eval(&tiny);
        assert!(v.is_infinite() && v > 0.0, "magnitude saturates honestly");
        // One-sided: a point almost at 1 is harmless (value near c1).
        let near_one = Rat::one() - &tiny;
        assert!(close(f.eval(&near_one), 1.0, 1e-9));
        // Two-sided: the mirror singularity saturates there instead.
        let two = PowerObservable::new(1.0, 1.0, 1.0).unwrap();
        let v: f64 = two.eval(&near_one);
        assert!(v.is_infinite());
    }

    #[test]
    fn construction_guards() {
        assert!(PowerObservable::new(0.9f64, 1.0, 0.0).is_err());
        assert!(PowerObservable::new(1.0 + 1e-8, 1.0, 0.0).is_err());
        assert!(PowerObservable::new(f64::NAN, 1.0, 0.0).is_err());
        assert!(PowerObservable::new(1.0f64, 0.0, 0.0).is_err());
        assert!(PowerObservable::new(1.0f64, -1.0, 0.0).is_err());
        assert!(PowerObservable::new(1.0f64, 1.0, -0.1).is_err());
        assert!(PowerObservable::new(1.0f64, 1.0, 0.0).is_ok());
        assert!(PowerObservable::new(1.0 + 2e-6, 1.0, 0.0).is_ok());
        assert!(PowerObservable::new(2.5f64, 0.3, 1.7).is_ok());
    }

    #[test]
    fn parse_and_display_round_trip() {
        let f: PowerObservable<f64> = "pow:beta=2,c1=1,c2=0".parse().unwrap();
        assert_eq!(f.beta(), 2.0);
        assert_eq!(f. c1(), 1.0);
        assert_eq!(f.to_string().parse::<PowerObservable<f64>>().unwrap(), f);
        let g: PowerObservable<f64> = "pow:beta=1,c1=0.5".parse().unwrap();
        assert_eq!(g.c2(), 0.0);
        assert!("pow:beta=2".parse::<PowerObservable<f64>>().is_err()); // missing c1
        assert!("pow:c1=1".parse::<PowerObservable<f64>>().is_err()); // missing beta
        assert!("pow:beta=2,c1=1,zz=3".parse::<PowerObservable<f64>>().is_err());
        assert!("exp:beta=2,c1=1".parse::<PowerObservable<f64>>().is_err());
        assert!("pow:beta=0.5,c1=1".parse::<PowerObservable<f64>>().is_err()); // domain
    }

    #[test]
    fn truncation_closed_forms() {
        let f = one_sided(1.0, 1.0);
        let t = f.truncate(&rat(1, 8)).unwrap();
        assert!(close(t.integral(), (8.0f64).ln(), 1e-12));
        assert!(close(t.variation(), 15.0, 1e-12));
        let g = one_sided(2.0, 1.0);
        let tg = g.truncate(&rat(1, 10)).unwrap();
        assert!(close(tg.integral(), 9.0, 1e-12));
        // Vanishing support: integral tends to 0 as t tends to 1.
        let thin = f.truncate(&rat(999, 1000)).unwrap();
        let v: f64 = thin.integral();
        assert!(v > 0.0 && v < 2e-3);
        assert!(f.truncate(&Rat::zero()).is_err());
        assert!(f.truncate(&Rat::one()).is_err());
        assert!(f.truncate(&rat(3, 2)).is_err());
        let two = PowerObservable::new(1.0, 1.0, 1.0).unwrap();
        assert!(two.truncate(&rat(2, 5)).is_ok());
        assert!(two.truncate(&rat(1, 2)).is_err()); // empty support
    }

    #[test]
    fn truncated_support_membership() {
        let f = one_sided(1.0, 1.0);
        let t = f.truncate(&rat(1, 8)).unwrap();
        assert_eq!(t.eval(&rat(1, 16)), 0.0);
        assert!(close(t.eval(&rat(1, 8)), 8.0, 1e-12));
        assert!(close(t.eval(&rat(1, 2)), 2.0, 1e-12));
        assert_eq!(t.support_end(), Rat::one());
        let two = PowerObservable::new(1.0, 1.0, 1.0).unwrap();
        let tt = two.truncate(&rat(1, 4)).unwrap();
        assert_eq!(tt.eval(&rat(1, 5)), 0.0);
        assert!(close(tt.eval(&rat(1, 4)), 16.0 / 3.0, 1e-12));
        assert!(close(tt.eval(&rat(3, 4)), 16.0 / 3.0, 1e-12)); // end inclusive
        assert_eq!(tt.eval(&rat(4, 5)), 0.0);
        assert_eq!(tt.support_end(), rat(3, 4));
    }

    fn simpson_rule<F: Fn(f64) -> f64>(f: &F, a: f64, m: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
    }

    fn adaptive<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        m: f64,
        b: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let left = simpson_rule(f, a, lm, m);
        let right = simpson_rule(f, m, rm, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            left + right + delta / 15.0
        } else {
            adaptive(f, a, lm, m, left, 0.5 * eps, depth - 1)
                + adaptive(f, m, rm, b, right, 0.5 * eps, depth - 1)
        }
    }

    fn quadrature<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, eps: f64) -> f64 {
        let m = 0.5 * (a + b);
        adaptive(f, a, m, b, simpson_rule(f, a, m, b), eps, 48)
    }

    #[test]
    fn integral_matches_quadrature() {
        let mut rng = SplitMix64::new(0x0b5e_71a5);
        for round in 0..100 {
            let beta = if round % 3 == 0 {
                1.0
            } else {
                1.01 + (rng.below(1_000) as f64) / 1_000.0 * 2.49
            };
            let c1 = 0.2 + (rng.below(1_000) as f64) / 1_000.0 * 1.8;
            let c2 = if round % 2 == 0 { 0.0 } else { 0.2 + (rng.below(1_000) as f64) / 500.0 };
            let obs = PowerObservable::new(beta, c1, c2).unwrap();
            let den = 64 + rng.below(1_000) as i64;
            let num = 1 + rng.below((den as u64 * 45 / 100).max(1)) as i64;
            let t = rat(num, den);
            let trunc = obs.truncate(&t).unwrap();
            let closed: f64 = trunc.integral();
            let a = num as f64 / den as f64;
            let b = if c2 > 0.0 { 1.0 - a } else { 1.0 };
            let quad = quadrature(&|x| obs.eval_f64(x), a, b, 1e-12 * closed.abs());
            assert!(
                close(closed, quad, 1e-9),
                "integral mismatch: closed {closed} vs quadrature {quad} \
                 (beta {beta}, c1 {c1}, c2 {c2}, t {t})"
            );
        }
    }

    #[test]
    fn variation_matches_mesh() {
        let mut rng = SplitMix64::new(0x7a11_57ee);
        for round in 0..40 {
            let beta = if round % 4 == 0 { 1.0 } else { 1.2 + (rng.below(100) as f64) / 50.0 };
            let c1 = 0.3 + (rng.below(100) as f64) / 50.0;
            let c2 = if round % 2 == 0 { 0.0 } else { 0.3 + (rng.below(100) as f64) / 50.0 };
            let obs = PowerObservable::new(beta, c1, c2).unwrap();
            let den = 32 + rng.below(500) as i64;
            let num = 1 + rng.below((den as u64 * 45 / 100).max(1)) as i64;
            let t = rat(num, den);
            let trunc = obs.truncate(&t).unwrap();
            let closed: f64 = trunc.variation();
            let a = num as f64 / den as f64;
            let b = if c2 > 0.0 { 1.0 - a } else { 1.0 };
            let m = 4096;
            let mut mesh_tv = obs.eval_f64(a); // jump up at the left edge
            if c2 > 0.0 {
                mesh_tv += obs.eval_f64(b); // jump down at the interior right edge
            }
            let mut prev = obs.eval_f64(a);
            for i in 1..=m {
                let x = a + (b - a) * (i as f64) / (m as f64);
                let v = obs.eval_f64(x);
                mesh_tv += (v - prev).abs();
                prev = v;
            }
            assert!(
                close(closed, mesh_tv, 1e-4) && closed >= mesh_tv - 1e-9 * closed.abs(),
                "variation mismatch: closed {closed} vs mesh {mesh_tv} \
                 (beta {beta}, c1 {c1}, c2 {c2}, t {t})"
            );
        }
    }

    #[test]
    fn tail_measure_closed_forms() {
        let f = one_sided(1.0, 1.0);
        assert!(close(f.tail_measure(10.0), 0.1, 1e-12));
        assert_eq!(f.tail_measure(0.5), 1.0); // saturated below c1
        let g = one_sided(2.0, 1.0);
        assert!(close(g.tail_measure(100.0), 0.1, 1e-12));
        let two = PowerObservable::new(1.0, 1.0, 1.0).unwrap();
        // f(x) = 1/x + 1/(1-x) has minimum 4 at 1/2; the level set at s = 5
        // solves x(1-x) = 1/5, so the measure is 1 - sqrt(1 - 4/5).
        assert!(close(two.tail_measure(5.0), 1.0 - 0.2f64.sqrt(), 1e-9));
        assert_eq!(two.tail_measure(4.0), 1.0);
        assert_eq!(two.tail_measure(3.9), 1.0);
        // Asymmetric two-sided spot value against direct bisection algebra:
        // c1=2, c2=1, beta=1: 2/x + 1/(1-x) = s has roots of
        // s x^2 - (s+1) x + 2 = 0.
        let asym = PowerObservable::new(1.0, 2.0, 1.0).unwrap();
        let s = 12.0f64;
        let disc = ((s + 1.0) * (s + 1.0) - 8.0 * s).sqrt();
        let lo = ((s + 1.0) - disc) / (2.0 * s);
        let hi = ((s + 1.0) + disc) / (2.0 * s);
        assert!(close(asym.tail_measure(s), lo + 1.0 - hi, 1e-9));
    }

    #[test]
    fn normalizer_values() {
        assert!(close(normalizer_1x(100), 460.5170185988092, 1e-12));
        assert!(close(normalizer_1x(3), 3.0 * 3.0f64.ln(), 1e-12));
        assert!(close(normalizer_1x(1_000_000), 1.3815510557964274e7, 1e-12));
        assert!(close(normalizer_beta(1000, 10, 2.0f64).unwrap(), 1e5, 1e-12));
        assert!(close(normalizer_beta(100, 4, 3.0f64).unwrap(), 31_250.0, 1e-12));
        // Fully trimmed: k = N collapses to N / (beta - 1).
        assert!(close(normalizer_beta(50, 50, 2.5f64).unwrap(), 50.0 / 1.5, 1e-12));
        assert!(normalizer_beta(100, 1, 1.0f64).is_err());
        assert!(normalizer_beta(100, 1, 0.5f64).is_err());
        assert!(normalizer_beta(100, 0, 2.0f64).is_err());
        assert!(normalizer_beta(100, 101, 2.0f64).is_err());
    }

    #[test]
    fn tail_condition_reference_trajectories() {
        let grid = [100u64, 1_000, 10_000, 100_000, 1_000_000];
        let f = one_sided(1.0, 1.0);
        let k1 = TrimmingSequence::constant(1);
        // 1/x, k = 1, d = N ln N: the scaled tail is exactly 1/ln N.
        let t = tail_condition_check(&f, &k1, &Normalizer::NLogN, &grid, &[1.0f64]).unwrap();
        assert_eq!(t.len(), 1);
        for (&n, &v) in grid.iter().zip(&t[0].scaled_measures) {
            assert!(close(v, 1.0 / (n as f64).ln(), 1e-9), "N = {n}: {v}");
        }
        assert!(t[0].decays);
        // Fixed scale: the scaled tail grows linearly; flagged as not decaying.
        let fixed = tail_condition_check(&f, &k1, &Normalizer::Constant(5.0), &grid, &[1.0]).unwrap();
        assert!(!fixed[0].decays);
        assert!(close(*fixed[0].scaled_measures.last().unwrap(), 1_000_000.0 / 5.0, 1e-9));
        // Slowly growing trimming under N ln N still decays: value k/(c ln N).
        let slow = TrimmingSequence::log_power(0.5).unwrap();
        let s = tail_condition_check(&f, &slow, &Normalizer::NLogN, &grid, &[1.0]).unwrap();
        assert!(s[0].decays);
        // Power-law scale: the scaled tail equals ((beta-1) c1 / c)^(1/beta)
        // times k(N) — it cannot decay for any growing trimming, which is
        // why removing the trimming is never justified in this regime.
        let g = one_sided(2.0, 1.0);
        let lg = TrimmingSequence::log_power(1.0).unwrap();
        let p = tail_condition_check(&g, &lg, &Normalizer::PowerScale(2.0), &grid, &[1.0]).unwrap();
        assert!(!p[0].decays);
        for (&n, &v) in grid.iter().zip(&p[0].scaled_measures) {
            let k = (n as f64).ln().ceil();
            assert!(close(v, k, 1e-9), "N = {n}: {v} vs k = {k}");
        }
        // Guards.
        assert!(tail_condition_check(&f, &k1, &Normalizer::NLogN, &[100], &[1.0]).is_err());
        assert!(tail_condition_check(&f, &k1, &Normalizer::NLogN, &[100, 100], &[1.0]).is_err());
        assert!(tail_condition_check(&f, &k1, &Normalizer::NLogN, &grid, &[]).is_err());
        assert!(tail_condition_check(&f, &k1, &Normalizer::NLogN, &grid, &[-1.0]).is_err());
        let table = TrimmingSequence::table(vec![(Int::from(500), Int::from(2))]).unwrap();
        assert!(tail_condition_check(&f, &table, &Normalizer::NLogN, &grid, &[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn strictly_decreasing_on_left_half(
            beta in prop_oneof![Just(1.0f64), 1.001..4.0f64],
            c1 in 0.1..3.0f64,
            a in 1u32..2048,
            b in 1u32..2048,
        ) {
            prop_assume!(a != b);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let obs = PowerObservable::new(beta, c1, 0.0).unwrap();
            let va: f64 = obs.eval(&rat(lo as i64, 4096));
            let vb: f64 = obs.eval(&rat(hi as i64, 4096));
            prop_assert!(va > vb, "f({lo}/4096) = {va} <= f({hi}/4096) = {vb}");
        }

        #[test]
        fn tail_of_value_round_trips(
            beta in prop_oneof![Just(1.0f64), 1.001..4.0f64],
            c1 in 0.1..3.0f64,
            n in 1u64..5000,
            d in 5001u64..10000,
        ) {
            let obs = PowerObservable::new(beta, c1, 0.0).unwrap();
            let x = Rat::new(Int::from(n), Int::from(d));
            let v: f64 = obs.eval(&x);
            let back: f64 = obs.tail_measure(v);
            let xf = n as f64 / d as f64;
            prop_assert!(close(back, xf, 1e-10), "lambda(f > f({xf})) = {back}");
        }

        #[test]
        fn power_scale_log_space_identity(
            beta in 1.01..5.0f64,
            n in 2u64..1_000_000,
        ) {
            let d: f64 = normalizer_beta(n, 1, beta).unwrap();
            let lhs = (d * (beta - 1.0)).ln();
            let rhs = beta * (n as f64).ln();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
        }
    }
}
