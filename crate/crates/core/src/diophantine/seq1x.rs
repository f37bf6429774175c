//! Digit streams with denominators growing fast enough to outrun a whole
//! family of trimming sequences dominated by an `o(N)` rule `l`.
//!
//! The key quantity is the threshold `u(eps) = min { N : l(m) < eps m for
//! all m >= N }`, found by an exact upward scan with a certified stopping
//! rule (a proven-decreasing continuous hull of `l(m)/m` falls below
//! `eps/2`).  The constructor then extends a seed so that every new level
//! satisfies `q_next > q^2 u(q^-2)` exactly.

use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use std::fmt;
use std::str::FromStr;

use crate::contfrac::stream::CoefficientStream;
use crate::error::{Error, Result};
use crate::util::big_to_f64;
use crate::Int;

/// Default number of scan candidates for the threshold search.
pub const DEFAULT_SCAN_BUDGET: u64 = 100_000_000;

/// An `o(N)` sequence rule dominating the trimmings of interest.
#[derive(Clone, Debug, PartialEq)]
pub enum DominatingRule {
    /// `l(m) = c`.
    Constant(u64),
    /// `l(m) = ceil(ln^p m)`, `p > 0`.
    LogPower(f64),
    /// `l(m) = ceil(m^theta)`, `0 < theta < 1` (>= 1 is not `o(N)`).
    Power(f64),
    /// `l(m) = ceil(m / ln^p m)` for `m >= 2`, `l(1) = 1`; `p > 0`.
    NOverLogPower(f64),
}

impl DominatingRule {
    /// Grammar: `const:c | logpow:p | pow:theta | noverlog:p`.
    pub fn parse(text: &str) -> Result<Self> {
        let (head, body) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("dominating rule needs 'kind:arg', got {text:?}")))?;
        match head {
            "const" => Ok(DominatingRule::Constant(body.parse().map_err(|e| {
                Error::Parse(format!("bad constant {body:?}: {e}"))
            })?)),
            "logpow" => {
                let p: f64 =
                    body.parse().map_err(|e| Error::Parse(format!("bad exponent {body:?}: {e}")))?;
                if !(p > 0.0) || !p.is_finite() {
                    return Err(Error::Validation(format!("log-power exponent must be > 0: {p}")));
                }
                Ok(DominatingRule::LogPower(p))
            }
            "pow" => {
                let t: f64 =
                    body.parse().map_err(|e| Error::Parse(format!("bad exponent {body:?}: {e}")))?;
                if !(t > 0.0 && t < 1.0) {
                    return Err(Error::Validation(format!(
                        "power exponent must be in (0,1) to keep l = o(N), got {t}"
                    )));
                }
                Ok(DominatingRule::Power(t))
            }
            "noverlog" => {
                let p: f64 =
                    body.parse().map_err(|e| Error::Parse(format!("bad exponent {body:?}: {e}")))?;
                if !(p > 0.0) || !p.is_finite() {
                    return Err(Error::Validation(format!("noverlog exponent must be > 0: {p}")));
                }
                Ok(DominatingRule::NOverLogPower(p))
            }
            other => Err(Error::Parse(format!("unknown dominating rule kind {other:?}"))),
        }
    }

    /// `l(m)` for `m >= 1`.
    pub fn value(&self, m: u64) -> Int {
        debug_assert!(m >= 1);
        match self {
            DominatingRule::Constant(c) => Int::from(*c),
            DominatingRule::LogPower(p) => {
                let v = (m as f64).ln().max(0.0).powf(*p);
                Int::from_f64(crate::util::fuzzy_ceil(v)).unwrap_or_else(Int::zero)
            }
            DominatingRule::Power(t) => {
                let v = (m as f64).powf(*t);
                Int::from_f64(crate::util::fuzzy_ceil(v)).unwrap_or_else(Int::zero)
            }
            DominatingRule::NOverLogPower(p) => {
                if m == 1 {
                    Int::one()
                } else {
                    let v = m as f64 / (m as f64).ln().powf(*p);
                    Int::from_f64(crate::util::fuzzy_ceil(v)).unwrap_or_else(Int::zero)
                }
            }
        }
    }

    /// A continuous upper hull `h(m) >= l(m)/m`, certified decreasing for
    /// `m >= hull_floor()`.
    fn hull(&self, m: u64) -> f64 {
        let mf = m as f64;
        match self {
            DominatingRule::Constant(c) => *c as f64 / mf,
            DominatingRule::LogPower(p) => (mf.ln().powf(*p) + 1.0) / mf,
            DominatingRule::Power(t) => (mf.powf(*t) + 1.0) / mf,
            DominatingRule::NOverLogPower(p) => 1.0 / mf.ln().powf(*p) + 1.0 / mf,
        }
    }

    /// Smallest `m` from which `hull` is decreasing.
    fn hull_floor(&self) -> u64 {
        match self {
            DominatingRule::Constant(_) => 1,
            DominatingRule::LogPower(p) => p.exp().ceil() as u64 + 1,
            DominatingRule::Power(_) => 1,
            DominatingRule::NOverLogPower(_) => 3,
        }
    }
}

impl fmt::Display for DominatingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DominatingRule::Constant(c) => write!(f, "const:{c}"),
            DominatingRule::LogPower(p) => write!(f, "logpow:{p}"),
            DominatingRule::Power(t) => write!(f, "pow:{t}"),
            DominatingRule::NOverLogPower(p) => write!(f, "noverlog:{p}"),
        }
    }
}

impl FromStr for DominatingRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DominatingRule::parse(s)
    }
}

/// `u(1/q^2) = 1 + max { m : l(m) q^2 >= m }` (and `1` when no such `m`).
///
/// Constant rules short-circuit to the closed form `c q^2 + 1`; other rules
/// scan upward with the certified stop `hull(m) q^2 < 0.49` and fail with a
/// budget error after `budget` candidates.
pub fn u_threshold(l: &DominatingRule, q: &Int, budget: u64) -> Result<Int> {
    debug_assert!(q >= &Int::one());
    if let DominatingRule::Constant(c) = l {
        return Ok(if *c == 0 { Int::one() } else { Int::from(*c) * q * q + Int::one() });
    }
    let q2: Int = q * q;
    let q2_small: Option<u128> = q2.to_u128();
    // Rounded-up f64 image of q^2 for the (conservative) stop certificate.
    let q2_up = big_to_f64(&q2).next_up();
    let floor = l.hull_floor();
    let mut last_violation: u64 = 0;
    let mut m: u64 = 1;
    while m <= budget {
        let lm = l.value(m);
        let violation = match (&q2_small, lm.to_u128()) {
            (Some(q2u), Some(lmu)) => match lmu.checked_mul(*q2u) {
                Some(prod) => prod >= m as u128,
                None => &lm * &q2 >= Int::from(m),
            },
            _ => &lm * &q2 >= Int::from(m),
        };
        if violation {
            last_violation = m;
        } else if m >= floor && l.hull(m) * q2_up < 0.49 {
            // hull decreasing beyond here and already < eps/2: no violation
            // can occur at any m' >= m.
            return Ok(Int::from(last_violation) + Int::one());
        }
        m += 1;
    }
    Err(Error::Budget(format!(
        "threshold scan for rule {l} at q = {q} exceeded {budget} candidates"
    )))
}

/// Extends `seed` so every new level satisfies `q_next > q^2 u(q^-2)`,
/// with the minimal digit that does so.  Verified exactly per level.
pub fn construct_alpha_seq1xrem(
    l: &DominatingRule,
    seed: &[Int],
    depth: usize,
    budget: u64,
) -> Result<CoefficientStream> {
    if seed.is_empty() {
        return Err(Error::Validation("construction needs seed digits".into()));
    }
    if depth <= seed.len() {
        return Err(Error::Validation(format!(
            "depth {depth} does not extend the {}-digit seed",
            seed.len()
        )));
    }
    if seed.iter().any(|a| a < &Int::one()) {
        return Err(Error::Validation("seed digits must be >= 1".into()));
    }
    let mut digits = seed.to_vec();
    let mut qs = vec![Int::zero(), Int::one()];
    for (i, a) in digits.iter().enumerate() {
        let next = a * &qs[i + 1] + &qs[i];
        qs.push(next);
    }
    for level in (seed.len() + 1)..=depth {
        let q_cur = qs[level].clone();
        let q_prev = qs[level - 1].clone();
        let u = u_threshold(l, &q_cur, budget)?;
        let target = &q_cur * &q_cur * &u; // need q_next > target
        // Minimal digit a with a q_cur + q_prev > target.
        let a = {
            let base = (&target - &q_prev).max(Int::zero()) / &q_cur;
            let mut a = base;
            while &a * &q_cur + &q_prev <= target {
                a += Int::one();
            }
            if a < Int::one() {
                Int::one()
            } else {
                a
            }
        };
        let q_next = &a * &q_cur + &q_prev;
        debug_assert!(q_next > target);
        digits.push(a);
        qs.push(q_next);
    }
    let label = format!("seq1x({l})[seed {} digits]", seed.len());
    Ok(CoefficientStream::constructed(digits, qs, label))
}

/// Re-verifies the defining inequality `q_{n+1} > q_n^2 u(q_n^-2)` on every
/// extended level of a constructed stream.
pub fn verify_seq1x_stream(
    stream: &CoefficientStream,
    l: &DominatingRule,
    seed_len: usize,
    budget: u64,
) -> Result<bool> {
    let qs = stream
        .construction_qs()
        .ok_or_else(|| Error::Validation("stream was not produced by a constructor".into()))?;
    for level in (seed_len + 1)..qs.len() - 1 {
        let q_cur = &qs[level];
        let q_next = &qs[level + 1];
        let u = u_threshold(l, q_cur, budget)?;
        if q_next <= &(q_cur * q_cur * u) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        for text in ["const:0", "logpow:1", "pow:0.5", "noverlog:1"] {
            let r = DominatingRule::parse(text).unwrap();
            assert_eq!(r.to_string(), text);
        }
        assert!(DominatingRule::parse("pow:1").is_err()); // l(N) = N is not o(N)
        assert!(DominatingRule::parse("pow:1.5").is_err());
        assert!(DominatingRule::parse("mystery:3").is_err());
    }

    #[test]
    fn zero_rule_threshold_is_one() {
        let l = DominatingRule::Constant(0);
        assert_eq!(u_threshold(&l, &Int::from(1009), 10).unwrap(), Int::one());
    }

    #[test]
    fn constant_rule_closed_form() {
        let l = DominatingRule::Constant(3);
        // last violation at m = 3 q^2.
        assert_eq!(u_threshold(&l, &Int::from(10), 10).unwrap(), Int::from(301));
    }

    #[test]
    fn noverlog_scan_at_eps_one() {
        // l(m) = ceil(m / ln m): violations of l(m) < m at m = 1, 2, 3 only.
        let l = DominatingRule::NOverLogPower(1.0);
        assert_eq!(u_threshold(&l, &Int::one(), 10_000).unwrap(), Int::from(4));
    }

    #[test]
    fn power_scan_small_q() {
        // l(m) = ceil(sqrt m), q = 3: the last m with ceil(sqrt m) * 9 >= m
        // is m = 90 (ceil(sqrt 90) = 10, 90 >= 90).
        let l = DominatingRule::Power(0.5);
        assert_eq!(u_threshold(&l, &Int::from(3), 100_000).unwrap(), Int::from(91));
    }

    #[test]
    fn scan_budget_exhausts() {
        // At q = 5 the noverlog violations persist up to about e^25.
        let l = DominatingRule::NOverLogPower(1.0);
        assert!(matches!(
            u_threshold(&l, &Int::from(5), 100_000),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn zero_trimming_construction_squares_denominators() {
        let l = DominatingRule::Constant(0);
        let seed = vec![Int::from(2)];
        let stream = construct_alpha_seq1xrem(&l, &seed, 5, 1000).unwrap();
        let qs = stream.construction_qs().unwrap();
        // Every extended level: q_next > q^2 (u = 1), minimal such digit.
        for level in 2..qs.len() - 1 {
            assert!(qs[level + 1] > &qs[level] * &qs[level]);
        }
        assert!(verify_seq1x_stream(&stream, &l, 1, 1000).unwrap());
    }

    #[test]
    fn noverlog_construction_one_level() {
        // Seed q_2 = 1: threshold u(1) = 4 forces q_3 = 5 minimally.
        let l = DominatingRule::NOverLogPower(1.0);
        let seed = vec![Int::one()];
        let stream = construct_alpha_seq1xrem(&l, &seed, 2, 10_000).unwrap();
        let qs = stream.construction_qs().unwrap();
        assert_eq!(qs[3], Int::from(5));
        // One more level would need u(1/25), which lies beyond any small budget.
        assert!(matches!(
            construct_alpha_seq1xrem(&l, &seed, 3, 10_000),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn constructed_stream_feeds_tables() {
        use crate::contfrac::table::ConvergentTable;
        let l = DominatingRule::Constant(1);
        let seed = vec![Int::from(3)];
        let mut stream = construct_alpha_seq1xrem(&l, &seed, 4, 1000).unwrap();
        let table = ConvergentTable::build(&mut stream, 4).unwrap();
        for n in 2..=3 {
            // q_{n+1} > q_n^2 * (q_n^2 + 1)
            let u = table.q(n) * table.q(n) + Int::one();
            assert!(table.q(n + 1) > &(table.q(n) * table.q(n) * u));
        }
        assert!(table.is_irrational());
    }
}
