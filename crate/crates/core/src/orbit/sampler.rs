//! Starting-point grids for experiment sweeps: one point per stratum of
//! `[0, 1)`, with numerators congruent to `1 mod 210` (`210 = 2*3*5*7`) so
//! samples stay off the orbit of `0` for typical step numerators, plus a
//! deterministic jitter inside each stratum.

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::orbit::context::RotationContext;
use crate::util::SplitMix64;
use crate::{Int, Rat};

/// Seed used by [`auto_point`] so CLI-selected grid points are reproducible.
pub const SAMPLER_SEED: u64 = 0x5eed_4a11_c0de;

/// `count` starting points on the proxy grid, the `i`-th inside stratum
/// `[i/count, (i+1)/count)`, strictly increasing, never exactly `0`.
pub fn stratified_points(ctx: &RotationContext, count: u64, seed: u64) -> Result<Vec<Rat>> {
    if count == 0 {
        return Err(Error::Domain("sample count must be >= 1".into()));
    }
    let q = ctx.alpha_den();
    if q < &(Int::from(count) * Int::from(430u64)) {
        return Err(Error::Domain(format!(
            "proxy denominator {q} too small to stratify into {count} cells"
        )));
    }
    let stride = q / Int::from(count);
    let span = (&stride / Int::from(210u64))
        .to_u64()
        .unwrap_or(u64::MAX)
        .clamp(1, 1 << 16);
    let mut rng = SplitMix64::new(seed);
    let mut out = Vec::with_capacity(usize::try_from(count).unwrap_or(usize::MAX));
    for i in 0..count {
        // floor(i q / count) is the exact stratum boundary; the jittered
        // offset stays below stride, so the point lands inside stratum i.
        let base = (Int::from(i) * q) / Int::from(count);
        let offset = Int::from(1 + 210 * rng.below(span));
        out.push(Rat::new(base + offset, q.clone()));
    }
    Ok(out)
}

/// The `i`-th of `g` stratified points under the fixed [`SAMPLER_SEED`]
/// (the CLI's `auto:i/g` starting-point syntax).
pub fn auto_point(ctx: &RotationContext, i: u64, g: u64) -> Result<Rat> {
    if i >= g {
        return Err(Error::Domain(format!("auto point index {i} outside 0..{g}")));
    }
    let points = stratified_points(ctx, g, SAMPLER_SEED)?;
    Ok(points[usize::try_from(i).expect("index below count")].clone())
}
