//! Trajectory diagnostics comparing a trimming sequence against the digit
//! growth of an angle: the "global" ratio `k(N) / max(b_n, max_{j<n} a_j)`
//! evaluated over an N-range, and the "subsequence" ratio `k(N_l) / b_n`
//! over an explicitly margin-bounded subsequence.

use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::contfrac::ostrowski::ostrowski_expand;
use crate::contfrac::table::ConvergentTable;
use crate::diophantine::trimming::TrimmingSequence;
use crate::error::{Error, Result};
use crate::util::{big_to_f64, ln_big, serde_int};
use crate::{Int, Rat};

/// One evaluated point of a ratio trajectory.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionPoint {
    #[serde(with = "serde_int")]
    pub n_value: Int,
    /// Level `n` with `q_n <= N < q_{n+1}`.
    pub level: usize,
    /// The denominator used for this point (digit maximum or leading
    /// numeration digit, depending on the trajectory).
    #[serde(with = "serde_int")]
    pub denominator: Int,
    #[serde(with = "serde_int")]
    pub k_value: Int,
    pub ratio: f64,
}

/// A ratio trajectory with finite-horizon summary statistics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionTrajectory {
    pub points: Vec<ConditionPoint>,
    pub min_ratio: f64,
    /// Least-squares slope of `ratio` against `ln N` over the trajectory.
    pub trend_slope: f64,
    /// `true` when the minimum over the final third of points strictly
    /// exceeds the minimum over the first third (a prefix statement only).
    pub grows_on_prefix: bool,
}

fn summarize(points: Vec<ConditionPoint>) -> ConditionTrajectory {
    let min_ratio = points.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min);
    // Least-squares slope of ratio vs ln N.
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for p in &points {
        let x = ln_big(&p.n_value);
        sx += x;
        sy += p.ratio;
        sxx += x * x;
        sxy += x * p.ratio;
    }
    let denom = n * sxx - sx * sx;
    let trend_slope = if denom.abs() > 0.0 { (n * sxy - sx * sy) / denom } else { 0.0 };

    let grows_on_prefix = if points.len() < 3 {
        points.last().map(|p| p.ratio).unwrap_or(0.0)
            > points.first().map(|p| p.ratio).unwrap_or(0.0)
    } else {
        let third = points.len() / 3;
        let head = points[..third].iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min);
        let tail = points[points.len() - third..]
            .iter()
            .map(|p| p.ratio)
            .fold(f64::INFINITY, f64::min);
        tail > head
    };
    ConditionTrajectory { points, min_ratio, trend_slope, grows_on_prefix }
}

/// Trajectory of `c(N) = k(N) / max(b_n, max_{j <= n-1} a_j)` where `b_n` is
/// the leading numeration digit of `N` and the `a_j` are the angle's digits.
///
/// The trimming sequence is validated at every point (`k(N) <= N`).
pub fn condition_iii(
    k: &TrimmingSequence,
    table: &ConvergentTable,
    ns: &[Int],
) -> Result<ConditionTrajectory> {
    if ns.is_empty() {
        return Err(Error::Validation("empty N range".into()));
    }
    let mut points = Vec::with_capacity(ns.len());
    for n_value in ns {
        let level = table.level_of(n_value)?;
        let expansion = ostrowski_expand(table, n_value)?;
        let b_top = expansion.digit(level).clone();
        let mut denominator = b_top;
        for j in 1..level {
            if table.digit(j) > &denominator {
                denominator = table.digit(j).clone();
            }
        }
        debug_assert!(denominator >= Int::one());
        let k_value = k.k(n_value)?;
        let ratio = big_to_f64(&k_value) / big_to_f64(&denominator);
        points.push(ConditionPoint { n_value: n_value.clone(), level, denominator, k_value, ratio });
    }
    Ok(summarize(points))
}

/// Trajectory of `k(N_l) / b_n` over a subsequence that stays a fixed margin
/// below `q_{n+1}`: every `N_l` must satisfy `N_l <= (1 - margin) q_{n+1}`.
pub fn condition_d(
    k: &TrimmingSequence,
    table: &ConvergentTable,
    subsequence: &[Int],
    margin: f64,
) -> Result<ConditionTrajectory> {
    if subsequence.is_empty() {
        return Err(Error::Validation("empty subsequence".into()));
    }
    if !(margin > 0.0 && margin < 1.0) {
        return Err(Error::Validation(format!("margin must be in (0,1), got {margin}")));
    }
    for w in subsequence.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::Validation("subsequence must be strictly increasing".into()));
        }
    }
    let bound = Rat::from_float(1.0 - margin)
        .ok_or_else(|| Error::Validation("margin is not finite".into()))?;
    let mut points = Vec::with_capacity(subsequence.len());
    for n_value in subsequence {
        let level = table.level_of(n_value)?;
        // Exact check N_l <= (1 - margin) q_{n+1}.
        let lhs = Rat::from(n_value.clone());
        let rhs = &bound * Rat::from(table.q(level + 1).clone());
        if lhs > rhs {
            return Err(Error::Validation(format!(
                "subsequence value {n_value} exceeds (1 - {margin}) q_{} = {}",
                level + 1,
                table.q(level + 1)
            )));
        }
        let expansion = ostrowski_expand(table, n_value)?;
        let denominator = expansion.digit(level).clone();
        debug_assert!(denominator >= Int::one());
        let k_value = k.k(n_value)?;
        let ratio = big_to_f64(&k_value) / big_to_f64(&denominator);
        points.push(ConditionPoint { n_value: n_value.clone(), level, denominator, k_value, ratio });
    }
    Ok(summarize(points))
}

/// The canonical margin-bounded subsequence read off the digit stream:
/// for every level `n` with `a_n > 2`, the multiples
/// `q_n, 2 q_n, ..., ceil(a_n / 2) q_n`.  All members sit below
/// `(2/3) q_{n+1}`, so they satisfy margin `1/4`.
pub fn canonical_subsequence(table: &ConvergentTable) -> Vec<Int> {
    let mut out = Vec::new();
    let two = Int::from(2);
    for n in 1..=table.depth() {
        let a = table.digit(n);
        if a > &two {
            // ceil(a/2)
            let half = (a + Int::one()).div_floor(&two);
            let mut s = Int::one();
            while s <= half {
                out.push(&s * table.q(n));
                s += Int::one();
            }
        }
    }
    out
}

/// Margin guaranteed by [`canonical_subsequence`] members.
pub const CANONICAL_MARGIN: f64 = 0.25;
