//! Floating scalar abstraction for the approximate side of the crate.
//!
//! Exact data (digits, convergents, orbit positions) always lives in
//! arbitrary-precision integers and rationals; everything that is inherently
//! approximate (observable values, normalizers, iterated logarithms, law
//! statistics) is generic over [`Real`] so that `f32` and `f64` instantiations
//! share one implementation. Concrete aliases live at the crate root.

use num_traits::{Float, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar used for observable values and statistics.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Sum + Copy + 'static
{
    /// Lossless-as-possible conversion from `f64` (used when exact rationals
    /// are rounded once at the boundary between exact and float code).
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 converts")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Compensated (Kahan) accumulator; keeps a running compensation term so the
/// final error is O(eps) instead of O(n * eps).
#[derive(Clone, Copy, Debug)]
pub struct Kahan<R: Real> {
    sum: R,
    comp: R,
}

impl<R: Real> Default for Kahan<R> {
    fn default() -> Self {
        Kahan { sum: R::zero(), comp: R::zero() }
    }
}

impl<R: Real> Kahan<R> {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline(always)]
    pub fn add(&mut self, v: R) {
        let y = v - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline(always)]
    pub fn value(&self) -> R {
        self.sum
    }

    /// Magnitude of the pending compensation term; a cheap, honest indicator
    /// of how much the plain sum has drifted.
    pub fn residual(&self) -> R {
        self.comp.abs()
    }
}
