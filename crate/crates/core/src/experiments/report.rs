//! Structured reports emitted by the experiment drivers.
//!
//! Every report carries the full configuration needed to regenerate it
//! (angle label and fingerprint, grids, seeds, exact sample points) plus a
//! canonical byte form: the JSON serialization with timing fields zeroed.
//! Two runs with identical configuration and seed produce byte-identical
//! canonical forms, which is what the replay harness compares.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Versioned schema tag embedded in every law report.
pub const LAW_SCHEMA: &str = "law/1";
/// Versioned schema tag embedded in every oscillation report.
pub const OSCILLATION_SCHEMA: &str = "oscillation/1";
/// Versioned schema tag embedded in every pointwise-oscillation report.
pub const POINT_OSC_SCHEMA: &str = "point-osc/1";
/// Versioned schema tag embedded in every window-sum bound table.
pub const QN_BOUND_SCHEMA: &str = "qn-bound/1";
/// Versioned schema tag embedded in every log-weight trajectory report.
pub const LOG_WEIGHT_SCHEMA: &str = "log-weight/1";

/// A report that can be reduced to canonical bytes for replay comparison.
pub trait ReplayReport: Serialize + Clone {
    /// Zeroes the fields that legitimately differ between identical runs
    /// (wall-clock timing); everything else must be deterministic.
    fn clear_timing(&mut self);

    /// Compact JSON of the timing-cleared report. Byte-identical across
    /// runs with the same configuration and seed.
    fn canonical_json(&self) -> Result<String> {
        let mut cleared = self.clone();
        cleared.clear_timing();
        serde_json::to_string(&cleared)
            .map_err(|e| Error::Validation(format!("report serialization failed: {e}")))
    }

    /// Hex SHA-256 digest of the canonical JSON.
    fn digest(&self) -> Result<String> {
        let bytes = self.canonical_json()?;
        let mut h = Sha256::new();
        h.update(bytes.as_bytes());
        Ok(format!("{:x}", h.finalize()))
    }
}

/// Lossless wire form for an `f64` that may legitimately be non-finite (the
/// `epsilon = infinity` sentinel): finite values stay JSON numbers,
/// non-finite values become the strings `"inf"`, `"-inf"`, `"nan"`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FloatRepr {
    Num(f64),
    Word(String),
}

fn float_encode(v: f64) -> FloatRepr {
    if v.is_finite() {
        FloatRepr::Num(v)
    } else if v.is_nan() {
        FloatRepr::Word("nan".into())
    } else if v > 0.0 {
        FloatRepr::Word("inf".into())
    } else {
        FloatRepr::Word("-inf".into())
    }
}

fn float_decode<E: serde::de::Error>(r: FloatRepr) -> std::result::Result<f64, E> {
    match r {
        FloatRepr::Num(v) => Ok(v),
        FloatRepr::Word(w) => match w.as_str() {
            "inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            "nan" => Ok(f64::NAN),
            other => Err(E::custom(format!("unrecognized float word {other:?}"))),
        },
    }
}

mod tolerant_f64 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        float_encode(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        float_decode(FloatRepr::deserialize(d)?)
    }
}

mod tolerant_f64_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| float_encode(*x)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<f64>, D::Error> {
        let raw: Vec<FloatRepr> = Vec::deserialize(d)?;
        raw.into_iter().map(float_decode::<D::Error>).collect()
    }
}

/// The deterministic starting-point design of a law run: `grid_size`
/// stratified points jittered from `seed`, recorded exactly as `num/den`
/// strings so every statistic is reproducible bit-for-bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleDesign {
    pub grid_size: u64,
    pub seed: u64,
    pub points: Vec<String>,
}

/// Empirical violation measure at one tolerance: the fraction of sampled
/// starting points with `|ratio - 1| > epsilon`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationCell {
    #[serde(with = "tolerant_f64")]
    pub epsilon: f64,
    pub lambda_hat: f64,
}

/// Per-length statistics of a law run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawRow {
    pub n: u64,
    pub k: u64,
    /// Normalizer `d_N`; `None` in self-normalized diagnostic runs where
    /// each ratio is the sum divided by itself.
    pub d: Option<f64>,
    /// One ratio per sampled starting point, in sample order.
    pub ratios: Vec<f64>,
    pub max_abs_dev: f64,
    pub violation_measures: Vec<ViolationCell>,
}

/// Full record of a strong- or weak-law sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawReport {
    pub schema: String,
    /// `"strong"` or `"weak"`.
    pub kind: String,
    pub angle: String,
    pub angle_fingerprint: String,
    pub observable: String,
    pub trimming: String,
    pub scale: String,
    pub n_grid: Vec<u64>,
    #[serde(with = "tolerant_f64_vec")]
    pub epsilons: Vec<f64>,
    pub sample: SampleDesign,
    pub rows: Vec<LawRow>,
    pub evals_estimate: u64,
    pub budget: u64,
    pub wall_clock_ms: u64,
}

impl ReplayReport for LawReport {
    fn clear_timing(&mut self) {
        self.wall_clock_ms = 0;
    }
}

/// One sampled set of an oscillation construction: its exact interval
/// decomposition, measure, and the extrema of the trimmed sums observed on
/// the sampled points (min/max over both samples and trim depths).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscSetReport {
    pub label: String,
    /// Exact open intervals as `num/den` endpoint pairs, sorted and disjoint.
    pub intervals: Vec<(String, String)>,
    #[serde(with = "crate::util::serde_rat")]
    pub measure: crate::Rat,
    pub samples: u64,
    /// Minimum over samples of the deepest-trim sum (the smallest value the
    /// statistic takes on this set).
    pub stat_min: f64,
    /// Maximum over samples of the untrimmed sum (the largest value).
    pub stat_max: f64,
    pub threshold: f64,
    /// `true` when the claim is `statistic > threshold` for every sample and
    /// every trim depth, `false` when it is `statistic < threshold`.
    pub want_above: bool,
    pub violating_samples: u64,
    pub pass: bool,
}

/// Record of an oscillation / counterexample construction run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillationReport {
    pub schema: String,
    /// `"one-over-x"` or `"power-beta"`.
    pub kind: String,
    pub angle: String,
    pub angle_fingerprint: String,
    pub observable: String,
    /// `"direct"`, or `"mirrored"` when the approximation sign at the chosen
    /// level forced the reflected-angle view.
    pub view: String,
    pub construction: String,
    pub level: usize,
    pub q_level: String,
    pub q_next: String,
    pub n: u64,
    /// Deepest trim applied: the sweep cap for threshold constructions, the
    /// exact trim count for single-depth gap constructions.
    pub k_max: u64,
    pub set_a: OscSetReport,
    pub set_b: OscSetReport,
    /// Smallest sampled separation `min_A S - max_B S` (gap constructions).
    pub gap: Option<f64>,
    /// The scale the gap is compared against (without its unknown constant).
    pub gap_scale: Option<f64>,
    pub gap_positive: Option<bool>,
    /// Fitted constant `gap / scale` with its sampled band; reported, never
    /// asserted.
    pub fitted_c: Option<f64>,
    pub fitted_c_low: Option<f64>,
    pub fitted_c_high: Option<f64>,
    /// Empirical split value of the level-set construction, when one is used.
    pub quantile_s0: Option<f64>,
    pub seed: u64,
    pub evals_estimate: u64,
    pub budget: u64,
    pub wall_clock_ms: u64,
}

impl ReplayReport for OscillationReport {
    fn clear_timing(&mut self) {
        self.wall_clock_ms = 0;
    }
}

/// Record of a single-point oscillation measurement: the spread between the
/// lightly and the fully cluster-trimmed sum at one starting point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointOscReport {
    pub schema: String,
    pub angle: String,
    pub angle_fingerprint: String,
    pub level: usize,
    pub q_level: String,
    pub q_next: String,
    /// Label of the slow gauge function used by the hypothesis test
    /// (`logK` = K-fold iterated logarithm).
    pub psi: String,
    pub psi_value: f64,
    /// `"explicit"` when the caller supplied `N`, `"generalized-scale"` when
    /// it came from the gauge rule.
    pub n_rule: String,
    pub n: u64,
    pub b_n: u64,
    /// Exact starting point, as `num/den`.
    pub x: String,
    /// Exact smallest positive orbit position over the first `q_level` steps.
    pub x_min: String,
    /// Numeric hypothesis threshold `1 / (q ln(q) psi(q))`.
    pub hypothesis_threshold: f64,
    pub hypothesis_met: bool,
    /// Why the verdict is absent, when it is.
    pub gate_reason: Option<String>,
    pub s_light: f64,
    pub s_deep: f64,
    pub measured_gap: f64,
    /// Harmonic lower bound for the same spread, when its own gate holds.
    pub harmonic_bound: Option<f64>,
    pub harmonic_verdict: Option<bool>,
    pub half_n_log_n: f64,
    /// `measured_gap >= half_n_log_n`, graded only when the hypothesis gate
    /// holds and the cluster is non-degenerate.
    pub verdict: Option<bool>,
    pub evals_estimate: u64,
    pub budget: u64,
    pub wall_clock_ms: u64,
}

impl ReplayReport for PointOscReport {
    fn clear_timing(&mut self) {
        self.wall_clock_ms = 0;
    }
}

/// One verdict of the window-sum bound table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QnBoundRow {
    pub level: usize,
    pub q: u64,
    pub x_index: u64,
    /// Exact starting point, as `num/den`.
    pub x: String,
    pub sum: f64,
    pub expected: f64,
    pub deviation: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Pass/fail table for `|S_q^1 - q ln q| <= factor * q` across denominator
/// levels and stratified starting points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QnBoundReport {
    pub schema: String,
    pub angle: String,
    pub angle_fingerprint: String,
    pub bound_factor: f64,
    pub q_limit: u64,
    pub x_count: u64,
    pub seed: u64,
    pub rows: Vec<QnBoundRow>,
    /// Indices into `rows` of every failing instance.
    pub failures: Vec<usize>,
    pub all_pass: bool,
    pub evals_estimate: u64,
    pub budget: u64,
    pub wall_clock_ms: u64,
}

impl ReplayReport for QnBoundReport {
    fn clear_timing(&mut self) {
        self.wall_clock_ms = 0;
    }
}

/// One point of the log-weight trajectory `N ln N / sum_j b_j q_j ln q_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogWeightPoint {
    /// Exact length, as a decimal string (witness lengths can exceed u64).
    pub n: String,
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
    /// Set when this length is the digit-times-denominator witness of the
    /// given level.
    pub witness_level: Option<usize>,
}

/// Trajectory of the log-weight ratio along a length grid, plus the witness
/// subsequence taken at each digit jump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogWeightReport {
    pub schema: String,
    pub angle: String,
    pub angle_fingerprint: String,
    pub points: Vec<LogWeightPoint>,
    pub witnesses: Vec<LogWeightPoint>,
    pub wall_clock_ms: u64,
}

impl ReplayReport for LogWeightReport {
    fn clear_timing(&mut self) {
        self.wall_clock_ms = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_law() -> LawReport {
        LawReport {
            schema: LAW_SCHEMA.into(),
            kind: "strong".into(),
            angle: "test".into(),
            angle_fingerprint: "abc".into(),
            observable: "pow:beta=1,c1=1,c2=0".into(),
            trimming: "const:1".into(),
            scale: "n-log-n".into(),
            n_grid: vec![10, 100],
            epsilons: vec![0.5, f64::INFINITY],
            sample: SampleDesign { grid_size: 2, seed: 7, points: vec!["1/3".into(), "2/3".into()] },
            rows: vec![],
            evals_estimate: 220,
            budget: 1000,
            wall_clock_ms: 55,
        }
    }

    #[test]
    fn canonical_form_drops_timing_and_is_stable() {
        let a = sample_law();
        let mut b = sample_law();
        b.wall_clock_ms = 9999;
        assert_eq!(a.canonical_json().unwrap(), b.canonical_json().unwrap());
        assert_eq!(a.digest().unwrap(), b.digest().unwrap());
        assert_eq!(a.digest().unwrap().len(), 64);
        let mut c = sample_law();
        c.sample.seed = 8;
        assert_ne!(a.canonical_json().unwrap(), c.canonical_json().unwrap());
    }

    #[test]
    fn non_finite_epsilons_roundtrip() {
        let a = sample_law();
        let json = serde_json::to_string(&a).unwrap();
        assert!(json.contains("\"inf\""));
        let back: LawReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.epsilons[0], 0.5);
        assert!(back.epsilons[1].is_infinite() && back.epsilons[1] > 0.0);
        assert_eq!(back, a);
    }

    #[test]
    fn violation_cell_with_nan_epsilon_roundtrips() {
        let cell = ViolationCell { epsilon: f64::NAN, lambda_hat: 0.0 };
        let json = serde_json::to_string(&cell).unwrap();
        let back: ViolationCell = serde_json::from_str(&json).unwrap();
        assert!(back.epsilon.is_nan());
    }
}
