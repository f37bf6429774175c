//! Exact finite unions of open intervals on the unit circle.
//!
//! The oscillation constructions are measure statements about explicit sets:
//! unions of translated open intervals. This module keeps those sets exact —
//! rational endpoints, exact mod-1 reduction, exact pairwise disjointness and
//! total measure — so a report can state `measure == gamma/1000` as an
//! identity rather than a floating-point approximation.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::util::SplitMix64;
use crate::{Int, Rat};

/// Jitter resolution for deterministic in-interval sampling.
const JITTER_DEN: u64 = 1 << 20;

/// A finite union of disjoint open intervals inside `[0, 1]`, stored sorted
/// by left endpoint. Endpoints are exact rationals; two intervals may share
/// an endpoint (open intervals touching at a point are still disjoint).
#[derive(Clone, Debug, PartialEq)]
pub struct UnitIntervals {
    parts: Vec<(Rat, Rat)>,
}

impl UnitIntervals {
    /// Builds a union from raw open intervals `(lo, hi)` anywhere on the real
    /// line, reducing each mod 1 (splitting intervals that wrap past an
    /// integer). Fails if any interval is empty or has length `>= 1`, or if
    /// the reduced intervals overlap on a set of positive measure.
    pub fn from_open(raw: &[(Rat, Rat)]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::Domain("interval union needs at least one interval".into()));
        }
        let one = Rat::one();
        let mut parts: Vec<(Rat, Rat)> = Vec::with_capacity(raw.len() + 4);
        for (lo, hi) in raw {
            let width = hi - lo;
            if width <= Rat::zero() {
                return Err(Error::Domain(format!(
                    "open interval ({lo}, {hi}) is empty or inverted"
                )));
            }
            if width >= one {
                return Err(Error::Domain(format!(
                    "open interval ({lo}, {hi}) has length >= 1 and cannot live on the circle"
                )));
            }
            let frac_lo = lo - lo.floor();
            let top = &frac_lo + &width;
            if top <= one {
                parts.push((frac_lo, top));
            } else {
                // Wraps past 1: split into the two circle arcs.
                parts.push((frac_lo, one.clone()));
                parts.push((Rat::zero(), top - &one));
            }
        }
        parts.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        for w in parts.windows(2) {
            if w[0].1 > w[1].0 {
                return Err(Error::Validation(format!(
                    "intervals overlap: ({}, {}) and ({}, {})",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        Ok(Self { parts })
    }

    /// The sorted disjoint parts.
    pub fn parts(&self) -> &[(Rat, Rat)] {
        &self.parts
    }

    /// Exact total length.
    pub fn measure(&self) -> Rat {
        let mut m = Rat::zero();
        for (lo, hi) in &self.parts {
            m += hi - lo;
        }
        m
    }

    /// Exact open membership of the mod-1 reduction of `x`.
    pub fn contains(&self, x: &Rat) -> bool {
        let xf = x - x.floor();
        self.parts.iter().any(|(lo, hi)| *lo < xf && xf < *hi)
    }

    /// The union translated by `shift` (mod 1). Measure is preserved.
    pub fn shifted(&self, shift: &Rat) -> Result<Self> {
        let raw: Vec<(Rat, Rat)> =
            self.parts.iter().map(|(lo, hi)| (lo + shift, hi + shift)).collect();
        Self::from_open(&raw)
    }

    /// Endpoints as exact `num/den` strings, for embedding in reports.
    pub fn endpoint_strings(&self) -> Vec<(String, String)> {
        self.parts.iter().map(|(lo, hi)| (lo.to_string(), hi.to_string())).collect()
    }

    /// Draws `count` deterministic points strictly inside the union, cycling
    /// through the parts in order and jittering within each part from `seed`.
    /// Every returned point satisfies [`Self::contains`].
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<Rat>> {
        if count == 0 {
            return Err(Error::Domain("sample count must be positive".into()));
        }
        let mut rng = SplitMix64::new(seed);
        let jd = Int::from(JITTER_DEN);
        let mut out = Vec::with_capacity(count);
        for i in 0..count {
            let (lo, hi) = &self.parts[i % self.parts.len()];
            // u in [1, JITTER_DEN - 1] keeps the point strictly interior.
            let u = 1 + rng.below(JITTER_DEN - 1);
            let frac = Rat::new(Int::from(u), jd.clone());
            out.push(lo + (hi - lo) * frac);
        }
        Ok(out)
    }
}
