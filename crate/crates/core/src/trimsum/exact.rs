//! Exact-rational trimmed sums for integer exponents.
//!
//! When `beta` is a (small) integer and the coefficients are taken at their
//! exact binary64 values, every observable value on the orbit grid is a
//! rational number, so the whole trimmed sum can be recomputed without any
//! rounding.  This lane exists to settle disputes about the float engine on
//! small instances; it sorts the full orbit and is deliberately capped.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::observables::PowerObservable;
use crate::orbit::RotationContext;
use crate::scalar::Real;
use crate::{Int, Rat};

/// Largest orbit the exact lane will process before refusing.
const EXACT_N_CAP: u64 = 4096;

/// Exactly computed trimmed sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactTrimmedSum {
    /// Number of orbit points summed.
    pub n: u64,
    /// Effective trimming count (clamped to `n`).
    pub k: u64,
    /// Full Birkhoff sum.
    pub total: Rat,
    /// Sum after removing the `k` largest values.
    pub trimmed: Rat,
    /// The removed `(orbit index, value)` pairs, values descending with
    /// exact ties broken toward the earlier index.
    pub removed: Vec<(u64, Rat)>,
}

/// Recomputes `S_N^k(f)(x)` in exact rational arithmetic.
///
/// Requires `beta` to be an integer in `[1, 64]`; the coefficients enter at
/// their exact binary64 values.  The orbit length is capped at a few
/// thousand points because rational denominators compound; this is a
/// verification lane, not a production path.
pub fn trimmed_sum_exact<R: Real>(
    ctx: &RotationContext,
    obs: &PowerObservable<R>,
    x: &Rat,
    n: u64,
    k: u64,
) -> Result<ExactTrimmedSum> {
    let beta_f = obs
        .beta()
        .to_f64()
        .ok_or_else(|| Error::Domain("exponent must be finite".into()))?;
    if beta_f.fract() != 0.0 || !(1.0..=64.0).contains(&beta_f) {
        return Err(Error::Domain(format!(
            "exact lane requires an integer exponent in [1, 64], got {beta_f}"
        )));
    }
    let beta = beta_f as u32;
    if n == 0 {
        return Err(Error::Domain("orbit length must be >= 1".into()));
    }
    if n > EXACT_N_CAP {
        return Err(Error::Budget(format!(
            "exact lane caps the orbit length at {EXACT_N_CAP}, got {n}"
        )));
    }
    if n > ctx.max_valid_n() {
        return Err(Error::Range(format!(
            "orbit length {n} exceeds the certified range {} of this context",
            ctx.max_valid_n()
        )));
    }
    let c1 = Rat::from_float(obs.c1().to_f64().unwrap_or(f64::NAN))
        .ok_or_else(|| Error::Domain("coefficient c1 must be finite".into()))?;
    let c2 = Rat::from_float(obs.c2().to_f64().unwrap_or(f64::NAN))
        .ok_or_else(|| Error::Domain("coefficient c2 must be finite".into()))?;
    let two_sided = c2.is_positive();

    let grid = ctx.orbit_grid(x)?;
    let l = &grid.grid_den;
    let l_pow = l.pow(beta);
    let mut v = grid.x_num.clone();
    let mut values: Vec<(u64, Rat)> = Vec::with_capacity(n as usize);
    let mut total = Rat::zero();
    for j in 0..n {
        let value = if v.is_zero() {
            Rat::zero()
        } else {
            let mut val = &c1 * Rat::new(l_pow.clone(), v.pow(beta));
            if two_sided {
                let m: Int = l - &v;
                val += &c2 * Rat::new(l_pow.clone(), m.pow(beta));
            }
            val
        };
        total += &value;
        values.push((j, value));
        if j + 1 < n {
            v += &grid.step_num;
            if &v >= l {
                v -= l;
            }
        }
    }
    let k_eff = k.min(n);
    values.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    values.truncate(k_eff as usize);
    let mut trimmed = total.clone();
    for (_, value) in &values {
        trimmed -= value;
    }
    Ok(ExactTrimmedSum { n, k: k_eff, total, trimmed, removed: values })
}
