//! Structural predicates of the orbit: the first-index coincidence
//! criterion, exact interval counting, and ordered-gap inspection.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbit::context::RotationContext;
use crate::orbit::select::argmin_mod;
use crate::util::rat_to_f64;
use crate::{Int, Rat};

/// Outcome of the first-index coincidence criterion at one `(x, N)`.
///
/// With `n` the level of `N` (`q_n <= N < q_{n+1}`) and `b_n = floor(N/q_n)`,
/// the criterion states: when the angle exceeds its level-`n` convergent and
/// the *last* point of the window `{x, ..., R^{q_n - 1} x}` in clockwise
/// order has signed position `<= -b_n delta_{n+1}`, then the index of the
/// minimal positive position is the same for the window of length `N` as for
/// the window of length `q_n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoincidenceReport {
    pub level: usize,
    pub b_n: u64,
    /// Index of the minimal positive position among the first `q_n` points.
    pub j1_window: u64,
    /// Same, among the first `N` points.
    pub j1_full: u64,
    /// Signed position of the clockwise-last point of the `q_n` window.
    pub last_signed: f64,
    /// Exact comparison `last_signed <= -b_n delta_{n+1}`.
    pub hypothesis_holds: bool,
    /// Exact comparison `j1_window == j1_full`.
    pub conclusion_holds: bool,
    /// True when none of the first `N` points sits exactly at `0`. The
    /// criterion presumes this: a point at `0` is left out of the ordering,
    /// yet its translate by `q_n` steps re-enters just right of `0` and can
    /// undercut the window minimum, breaking the conclusion while the
    /// hypothesis holds. Only zero-free orbits are covered by the criterion.
    pub zero_free: bool,
}

/// Evaluates the coincidence criterion exactly. Requires the positive sign
/// case (angle above its level-`n` convergent, i.e. odd `n`); the negative
/// case is reached through [`RotationContext::mirrored`].
pub fn j1_coincidence(ctx: &RotationContext, x: &Rat, n: u64) -> Result<CoincidenceReport> {
    let table = ctx.table();
    let level = table.level_of(&Int::from(n))?;
    if table.remainder_sign(level) != 1 {
        return Err(Error::Precondition(format!(
            "level {level} has the angle below its convergent; evaluate on \
             the mirrored context (reflected angle) instead"
        )));
    }
    let q_n: u64 = table
        .q(level)
        .try_into()
        .map_err(|_| Error::Range("window length exceeds u64".into()))?;
    let b_n: u64 = (Int::from(n) / table.q(level))
        .try_into()
        .map_err(|_| Error::Range("top numeration digit exceeds u64".into()))?;
    let delta = ctx.deltas().delta(level + 1).clone();
    let last = ctx.max_point(x, q_n)?;
    let last_signed = last.signed();
    let threshold = -(Rat::from(Int::from(b_n)) * &delta);
    let hypothesis_holds = last_signed <= threshold;
    let j1_window = ctx.x_min(x, q_n)?.index;
    let j1_full = ctx.x_min(x, n)?.index;
    let grid = ctx.orbit_grid(x)?;
    let zero_free = !argmin_mod(&grid.x_num, &grid.step_num, &grid.grid_den, n)
        .1
        .is_zero();
    Ok(CoincidenceReport {
        level,
        b_n,
        j1_window,
        j1_full,
        last_signed: rat_to_f64(&last_signed),
        hypothesis_holds,
        conclusion_holds: j1_window == j1_full,
        zero_free,
    })
}

/// `sum_{i=0}^{n-1} floor((a i + b) / m)` for `m >= 1`, `n >= 0`, any sign of
/// `a` and `b` — iterative Euclidean descent, `O(log)` big-integer steps.
fn floor_sum(n: &Int, m: &Int, a: &Int, b: &Int) -> Int {
    debug_assert!(m > &Int::zero() && !n.is_negative());
    let mut n = n.clone();
    let mut m = m.clone();
    let mut a = a.clone();
    let mut b = b.clone();
    let mut ans = Int::zero();
    if a.is_negative() || &a >= &m {
        let q = a.div_floor(&m);
        ans += &q * (&n * (&n - 1)) / 2;
        a -= &q * &m;
    }
    if b.is_negative() || &b >= &m {
        let q = b.div_floor(&m);
        ans += &q * &n;
        b -= &q * &m;
    }
    loop {
        if &a >= &m {
            let q = &a / &m;
            ans += &q * (&n * (&n - 1)) / 2;
            a -= &q * &m;
        }
        if &b >= &m {
            let q = &b / &m;
            ans += &q * &n;
            b -= &q * &m;
        }
        let y_max = &a * &n + &b;
        if y_max < m {
            break;
        }
        n = &y_max / &m;
        b = y_max.mod_floor(&m);
        std::mem::swap(&mut m, &mut a);
    }
    ans
}

/// Number of `j in [0, N)` with grid position numerator `< t` (so position
/// `< t / grid_den`); `0 <= t <= grid_den`.
fn count_numerator_below(x_num: &Int, step: &Int, l: &Int, n: u64, t: &Int) -> Int {
    if t <= &Int::zero() {
        return Int::zero();
    }
    let n_int = Int::from(n);
    // (z mod l) < t  <=>  floor(z/l) - floor((z-t)/l) = 1.
    floor_sum(&n_int, l, step, x_num) - floor_sum(&n_int, l, step, &(x_num - t))
}

/// Exact `#{0 <= j < N : R^j(x) in (u, v]}` with rational endpoints
/// `0 <= u < v <= 1`. The endpoint `v = 1` is the circle point `0`, so a
/// position exactly at `0` counts if and only if `v = 1`.
pub fn count_in_interval(
    ctx: &RotationContext,
    x: &Rat,
    n: u64,
    u: &Rat,
    v: &Rat,
) -> Result<u64> {
    if n == 0 || n > ctx.max_valid_n() {
        return Err(Error::Range(format!(
            "N = {n} outside certified range 1..={}",
            ctx.max_valid_n()
        )));
    }
    if u < &Rat::zero() || u >= v || v > &Rat::one() {
        return Err(Error::Domain(format!(
            "interval ({u}, {v}] must satisfy 0 <= u < v <= 1"
        )));
    }
    let grid = ctx.orbit_grid(x)?;
    let l = &grid.grid_den;
    let scaled_floor = |r: &Rat| -> Int { (r * Rat::from(l.clone())).floor().to_integer() };
    // numerator in (u l, v l]  <=>  floor(u l) + 1 <= numerator <= floor(v l).
    let t_low = scaled_floor(u) + Int::one();
    let t_high = (scaled_floor(v) + Int::one()).min(l.clone());
    let mut count =
        count_numerator_below(&grid.x_num, &grid.step_num, l, n, &t_high)
            - count_numerator_below(&grid.x_num, &grid.step_num, l, n, &t_low);
    if v == &Rat::one() {
        // Positions exactly at 0 are the circle point 1.
        count += count_numerator_below(&grid.x_num, &grid.step_num, l, n, &Int::one());
    }
    count
        .try_into()
        .map_err(|_| Error::Range("interval count exceeds u64".into()))
}

/// Minimal circle distance between any two distinct points among the first
/// `N` orbit positions. Position differences are multiples of the step alone,
/// so the result does not depend on the starting point: it is the minimum of
/// `||d p_M / q_M||` over `1 <= d < N`. `N >= 2` required.
pub fn min_pairwise_distance(ctx: &RotationContext, n: u64) -> Result<Rat> {
    if n < 2 {
        return Err(Error::Domain("distance inspection needs N >= 2".into()));
    }
    if n > ctx.max_valid_n() {
        return Err(Error::Range(format!(
            "N = {n} beyond certified range {}",
            ctx.max_valid_n()
        )));
    }
    let q = ctx.alpha_den();
    let p = ctx.alpha_num();
    let (_, fwd) = argmin_mod(p, p, q, n - 1);
    let rev_step = q - p;
    let (_, rev) = argmin_mod(&rev_step, &rev_step, q, n - 1);
    let best = fwd.min(rev);
    if best.is_zero() {
        return Err(Error::Validation(
            "positions are not pairwise distinct at this length".into(),
        ));
    }
    Ok(Rat::new(best, q.clone()))
}
