//! Prefix-horizon Diophantine profiling of a digit stream.
//!
//! "Roth type" and "bounded type" are asymptotic properties; everything
//! reported here is a statement about the materialized prefix only, with the
//! horizon recorded.  Verdict definitions (documented, finite-horizon):
//!
//! * `roth_consistent_on_prefix`: every ratio `ln q_{n+1} / ln q_n` in the
//!   final third of the computed ratio sequence is `<= 1.2`.
//! * `bounded_on_prefix`: no new maximum digit appears in the final third of
//!   the digit sequence.

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::contfrac::table::ConvergentTable;
use crate::error::{Error, Result};
use crate::util::{ln_big, serde_int};
use crate::Int;

/// Threshold on `ln q_{n+1} / ln q_n` used by the prefix verdict.
pub const ROTH_RATIO_THRESHOLD: f64 = 1.2;

/// Prefix growth/digit statistics with finite-horizon verdicts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiophantineReport {
    pub label: String,
    /// Number of digits inspected (levels `1..=horizon`).
    pub horizon: usize,
    /// Level of the first ratio entry: `ratios[i]` is
    /// `ln q_{n+1} / ln q_n` for `n = first_ratio_level + i`.
    pub first_ratio_level: usize,
    pub ratios: Vec<f64>,
    #[serde(with = "serde_int")]
    pub max_digit: Int,
    /// Level at which the maximum digit first appears.
    pub max_digit_level: usize,
    pub roth_consistent_on_prefix: bool,
    pub bounded_on_prefix: bool,
}

/// Computes the growth-ratio sequence `ln q_{n+1} / ln q_n` and the prefix
/// verdicts for an irrational digit stream.
pub fn roth_profile(table: &ConvergentTable) -> Result<DiophantineReport> {
    if table.depth() < 3 {
        return Err(Error::Length(format!(
            "diophantine profile needs >= 3 levels, table has {}",
            table.depth()
        )));
    }
    if !table.is_irrational() {
        return Err(Error::Domain(
            "diophantine profile is for irrational values; got a finite rational expansion".into(),
        ));
    }
    let depth = table.depth();

    // Ratios start at the first n with q_n >= 2 (so ln q_n > 0).
    let two = Int::from(2);
    let first_ratio_level = (1..=depth)
        .find(|&n| table.q(n) >= &two)
        .ok_or_else(|| Error::Length("no level with q_n >= 2 in prefix".into()))?;
    let mut ratios = Vec::new();
    for n in first_ratio_level..=depth {
        ratios.push(ln_big(table.q(n + 1)) / ln_big(table.q(n)));
    }

    let mut max_digit = Int::one();
    let mut max_digit_level = 1;
    for n in 1..=depth {
        if table.digit(n) > &max_digit {
            max_digit = table.digit(n).clone();
            max_digit_level = n;
        }
    }

    // Final-third windows for both verdicts.
    let tail_start = ratios.len() - ratios.len() / 3;
    let roth_consistent_on_prefix =
        ratios[tail_start..].iter().all(|&r| r <= ROTH_RATIO_THRESHOLD);
    let digit_tail_start = depth - depth / 3 + 1;
    let bounded_on_prefix = max_digit_level < digit_tail_start;

    Ok(DiophantineReport {
        label: table.label().to_string(),
        horizon: depth,
        first_ratio_level,
        ratios,
        max_digit,
        max_digit_level,
        roth_consistent_on_prefix,
        bounded_on_prefix,
    })
}
