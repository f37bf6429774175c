//! Trimming sequences `k(N)`: how many of the largest orbit values are
//! removed from a Birkhoff sum of length `N`.

use num_bigint::BigInt;
use num_traits::{FromPrimitive, Signed, Zero};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::util::{fuzzy_ceil, ln_big};
use crate::Int;

/// The rule generating `k(N)`.
#[derive(Clone, Debug, PartialEq)]
pub enum TrimRule {
    /// `k(N) = c`.
    Constant(Int),
    /// `k(N) = ceil(ln^p N)`, `p > 0`.
    LogPower(f64),
    /// `k(N) = ceil(N^theta)`, `0 < theta <= 1`.
    Power(f64),
    /// Step table: `k(N)` = value at the largest listed `N_i <= N`, and `0`
    /// before the first entry.  Entries sorted by `N`.
    Table(Vec<(Int, Int)>),
}

/// A trimming sequence with the invariant `0 <= k(N) <= N` enforced at every
/// evaluation, plus an optional monotonicity contract.
#[derive(Clone, Debug)]
pub struct TrimmingSequence {
    rule: TrimRule,
    monotone: bool,
}

impl TrimmingSequence {
    pub fn constant(c: u64) -> Self {
        TrimmingSequence { rule: TrimRule::Constant(Int::from(c)), monotone: true }
    }

    pub fn log_power(p: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::Validation(format!("log-power exponent must be > 0, got {p}")));
        }
        Ok(TrimmingSequence { rule: TrimRule::LogPower(p), monotone: true })
    }

    pub fn power(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::Validation(format!(
                "power exponent must be in (0, 1] so that k(N) <= N, got {theta}"
            )));
        }
        Ok(TrimmingSequence { rule: TrimRule::Power(theta), monotone: true })
    }

    /// Explicit step table.  Entries must be strictly increasing in `N`; the
    /// monotone flag is validated against the `k` values.
    pub fn table(mut entries: Vec<(Int, Int)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Validation("trimming table needs at least one entry".into()));
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Validation(format!("duplicate table N = {}", w[0].0)));
            }
        }
        for (n, k) in &entries {
            if n.is_negative() || k.is_negative() {
                return Err(Error::Validation("table entries must be nonnegative".into()));
            }
            if k > n {
                return Err(Error::Validation(format!("table entry k = {k} exceeds N = {n}")));
            }
        }
        let monotone = entries.windows(2).all(|w| w[0].1 <= w[1].1);
        Ok(TrimmingSequence { rule: TrimRule::Table(entries), monotone })
    }

    pub fn rule(&self) -> &TrimRule {
        &self.rule
    }

    /// Whether this rule is nondecreasing in `N` (by construction for the
    /// closed-form rules, validated for tables).
    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    /// Evaluates `k(N)`; errors if the rule produces `k > N` or the value is
    /// too large to round exactly.
    pub fn k(&self, n_value: &Int) -> Result<Int> {
        if n_value < &Int::zero() {
            return Err(Error::Domain("trimming sequence needs N >= 0".into()));
        }
        let k = match &self.rule {
            TrimRule::Constant(c) => c.clone(),
            TrimRule::LogPower(p) => {
                if n_value.is_zero() {
                    Int::zero()
                } else {
                    let ln = ln_big(n_value).max(0.0);
                    ceil_to_int(ln.powf(*p))?
                }
            }
            TrimRule::Power(theta) => {
                if n_value.is_zero() {
                    Int::zero()
                } else {
                    let log_val = theta * ln_big(n_value);
                    if log_val > 700.0 {
                        return Err(Error::Range(format!(
                            "power-rule value exp({log_val:.1}) too large to round exactly"
                        )));
                    }
                    let k = ceil_to_int(log_val.exp())?;
                    // Rounding near N^1: never exceed N itself.
                    if &k > n_value { n_value.clone() } else { k }
                }
            }
            TrimRule::Table(entries) => entries
                .iter()
                .take_while(|(n, _)| n <= n_value)
                .last()
                .map(|(_, k)| k.clone())
                .unwrap_or_else(Int::zero),
        };
        if &k > n_value {
            return Err(Error::Validation(format!("trimming k({n_value}) = {k} exceeds N")));
        }
        Ok(k)
    }

    /// Evaluates `k` on a sorted batch, verifying the monotone contract on
    /// the evaluated prefix when the flag is set.
    pub fn k_batch(&self, ns: &[Int]) -> Result<Vec<Int>> {
        let values: Vec<Int> = ns.iter().map(|n| self.k(n)).collect::<Result<_>>()?;
        if self.monotone {
            for i in 1..values.len() {
                if ns[i] >= ns[i - 1] && values[i] < values[i - 1] {
                    return Err(Error::Validation(format!(
                        "monotone trimming rule decreased: k({}) = {} < k({}) = {}",
                        ns[i],
                        values[i],
                        ns[i - 1],
                        values[i - 1]
                    )));
                }
            }
        }
        Ok(values)
    }
}

/// Grammar: `const:c | logpow:p | pow:theta | table:N1:k1,N2:k2,...`.
impl FromStr for TrimmingSequence {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (head, body) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("trimming rule needs 'kind:args', got {text:?}")))?;
        match head {
            "const" => {
                let c: u64 = body
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad constant trimming {body:?}: {e}")))?;
                Ok(TrimmingSequence::constant(c))
            }
            "logpow" => {
                let p: f64 = body
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad log-power {body:?}: {e}")))?;
                TrimmingSequence::log_power(p)
            }
            "pow" => {
                let t: f64 = body
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad power {body:?}: {e}")))?;
                TrimmingSequence::power(t)
            }
            "table" => {
                let mut entries = Vec::new();
                for pair in body.split(',') {
                    let (n, k) = pair.split_once(':').ok_or_else(|| {
                        Error::Parse(format!("table entry needs 'N:k', got {pair:?}"))
                    })?;
                    let n = BigInt::from_str(n.trim())
                        .map_err(|e| Error::Parse(format!("bad table N {n:?}: {e}")))?;
                    let k = BigInt::from_str(k.trim())
                        .map_err(|e| Error::Parse(format!("bad table k {k:?}: {e}")))?;
                    entries.push((n, k));
                }
                TrimmingSequence::table(entries)
            }
            other => Err(Error::Parse(format!("unknown trimming rule kind {other:?}"))),
        }
    }
}

impl fmt::Display for TrimmingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            TrimRule::Constant(c) => write!(f, "const:{c}"),
            TrimRule::LogPower(p) => write!(f, "logpow:{p}"),
            TrimRule::Power(t) => write!(f, "pow:{t}"),
            TrimRule::Table(entries) => {
                write!(f, "table:")?;
                for (i, (n, k)) in entries.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{n}:{k}")?;
                }
                Ok(())
            }
        }
    }
}

fn ceil_to_int(x: f64) -> Result<Int> {
    if !x.is_finite() {
        return Err(Error::Range(format!("trimming value {x} not representable")));
    }
    Int::from_f64(fuzzy_ceil(x))
        .ok_or_else(|| Error::Range(format!("trimming value {x} not representable")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: u64) -> Int {
        Int::from(v)
    }

    #[test]
    fn constant_rule() {
        let k = TrimmingSequence::constant(5);
        assert_eq!(k.k(&int(100)).unwrap(), int(5));
        assert!(k.k(&int(3)).is_err()); // 5 > 3 violates k <= N
    }

    #[test]
    fn log_power_rule() {
        let k = TrimmingSequence::log_power(1.0).unwrap();
        assert_eq!(k.k(&int(1_000_000)).unwrap(), int(14)); // ln 1e6 = 13.8155
        assert_eq!(k.k(&int(1)).unwrap(), int(0));
        let k2 = TrimmingSequence::log_power(2.0).unwrap();
        assert_eq!(k2.k(&int(1_000_000)).unwrap(), int(191)); // 13.8155^2 = 190.87
    }

    #[test]
    fn power_rule() {
        let k = TrimmingSequence::power(0.5).unwrap();
        assert_eq!(k.k(&int(100)).unwrap(), int(10));
        assert_eq!(k.k(&int(101)).unwrap(), int(11));
        assert!(TrimmingSequence::power(1.5).is_err());
        let full = TrimmingSequence::power(1.0).unwrap();
        assert_eq!(full.k(&int(7)).unwrap(), int(7));
    }

    #[test]
    fn table_rule_step_semantics() {
        let k: TrimmingSequence = "table:10:1,100:3,1000:7".parse().unwrap();
        assert!(k.is_monotone());
        assert_eq!(k.k(&int(5)).unwrap(), int(0));
        assert_eq!(k.k(&int(10)).unwrap(), int(1));
        assert_eq!(k.k(&int(99)).unwrap(), int(1));
        assert_eq!(k.k(&int(100)).unwrap(), int(3));
        assert_eq!(k.k(&int(5000)).unwrap(), int(7));
    }

    #[test]
    fn table_monotone_flag_tracks_values() {
        let k: TrimmingSequence = "table:10:5,100:2".parse().unwrap();
        assert!(!k.is_monotone());
        assert!(TrimmingSequence::table(vec![(int(10), int(20))]).is_err()); // k > N
    }

    #[test]
    fn batch_checks_monotonicity() {
        let k = TrimmingSequence::log_power(1.0).unwrap();
        let ns: Vec<Int> = (1..50).map(int).collect();
        let vals = k.k_batch(&ns).unwrap();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn parse_round_trip() {
        for text in ["const:3", "logpow:1.5", "pow:0.5", "table:10:1,100:3"] {
            let k: TrimmingSequence = text.parse().unwrap();
            assert_eq!(k.to_string(), text);
        }
        assert!("bogus:1".parse::<TrimmingSequence>().is_err());
        assert!("const".parse::<TrimmingSequence>().is_err());
    }
}
