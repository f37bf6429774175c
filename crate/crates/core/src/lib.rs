//! Trimmed Birkhoff sums of power-singular observables over circle rotations.
//!
//! The crate is organised around an exact integer/rational backbone:
//! rotation numbers enter as continued-fraction coefficient streams, orbits
//! are evaluated on an exact grid with a common denominator, and only the
//! final observable evaluations pass through floating point.  Floating-point
//! work is generic over the [`Real`] scalar trait (implemented for `f32` and
//! `f64`); exact work uses the crate-level [`Int`] and [`Rat`] aliases.

pub mod contfrac;
pub mod diophantine;
pub mod error;
pub mod experiments;
pub mod observables;
pub mod orbit;
pub mod scalar;
pub mod trimsum;
pub mod util;

/// Exact arbitrary-precision integer used throughout the crate.
pub type Int = num_bigint::BigInt;
/// Exact arbitrary-precision rational used throughout the crate.
pub type Rat = num_rational::BigRational;

pub use contfrac::{
    ostrowski_expand, ostrowski_value, rational_value, weighted_log_sums, CoefficientStream,
    ConvergentTable, DeltaTable, OstrowskiDigits, QuadraticSurd,
};
pub use diophantine::{DominatingRule, GrowthWindow, TrimmingSequence};
pub use error::{Error, Result};
pub use experiments::{
    LawReport, OscillationReport, PointOscReport, QnBoundReport, ReplayReport, UnitIntervals,
};
pub use observables::{
    normalizer_1x, normalizer_beta, tail_condition_check, Normalizer, PowerObservable,
    TailConditionTrajectory, TruncatedObservable,
};
pub use orbit::{OrbitPoint, RotationContext};
pub use scalar::{Kahan, Real};
pub use trimsum::{
    birkhoff_sum, trimmed_profile, trimmed_sum, trimmed_sum_exact, truncated_birkhoff_sum,
    ExactTrimmedSum, ProfileRow, TrimmedSumResult,
};
