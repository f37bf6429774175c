//! Selection of the k smallest positive orbit positions.
//!
//! Two implementations with identical contracts:
//!
//! * an oracle that scans all `N` positions once, keeping a bounded max-heap
//!   (`O(N log k)` time, `O(k)` space), and
//! * a fast path that finds the minimum positive position directly and then
//!   walks the value-order successor permutation of the point set, whose
//!   three-region structure (shift by `+r`, `+r-s`, or `-s`) follows from the
//!   three-gap geometry of rotation orbits (`O(k + log)` arithmetic).
//!
//! The fast path validates its own output (strictly increasing values,
//! in-range indices) and falls back to the oracle with a logged notice on any
//! structural violation, so its answers never depend on unverified geometry.

use std::collections::BinaryHeap;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::orbit::context::{OrbitGrid, OrbitPoint, RotationContext};
use crate::orbit::kernel::{kernel_for, KernelInt, KernelKind};
use crate::{Int, Rat};

/// One selected orbit point: time `index`, position `numerator / grid_den`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectedPoint {
    pub index: u64,
    pub numerator: Int,
}

/// Smallest index `j` in `[0, n)` minimizing `(a + j p) mod q`, with the
/// minimal value. Requires `0 <= a < q`, `0 <= p < q`, `n >= 1`; `q >= 1`.
///
/// The candidate minima are the values immediately after each wrap of the
/// linear sequence past `q`, and those form another linear-mod sequence
/// with modulus `p`, giving a Euclidean-style descent.  The descent is
/// iterative: each division step of the plain Euclidean chain can unroll
/// into a subtractive chain here, so the depth is bounded by `min(n, q)`
/// rather than `log q` and must not live on the call stack.
pub fn argmin_mod(a: &Int, p: &Int, q: &Int, n: u64) -> (u64, Int) {
    debug_assert!(n >= 1);
    debug_assert!(!a.is_negative() && a < q);
    debug_assert!(!p.is_negative() && p < q);
    // Descent: each level hands its wrap subsequence down as a smaller
    // instance.  `levels` records `(a, p)` per level; a level's modulus is
    // the previous level's step (the outermost modulus is `q`).
    let mut levels: Vec<(Int, Int)> = Vec::new();
    let mut a_cur = a.clone();
    let mut p_cur = p.clone();
    let mut q_cur = q.clone();
    let mut n_cur = n;
    let (mut idx, mut val) = loop {
        if n_cur == 1 || p_cur.is_zero() {
            break (0, a_cur);
        }
        // Number of wraps among j = 0..n_cur-1.
        let wraps = (&a_cur + Int::from(n_cur - 1) * &p_cur).div_floor(&q_cur);
        if wraps.is_zero() {
            break (0, a_cur);
        }
        let t = wraps.to_u64().expect("wrap count below n fits in u64");
        // Value right after the s-th wrap (s = 1..=t) is (a - s q) mod p, a
        // linear-mod sequence in s with start (a - q) mod p and step
        // (-q) mod p.
        let a2 = (&a_cur - &q_cur).mod_floor(&p_cur);
        let p2 = (-&q_cur).mod_floor(&p_cur);
        let next_q = p_cur.clone();
        levels.push((a_cur, p_cur));
        a_cur = a2;
        p_cur = p2;
        q_cur = next_q;
        n_cur = t;
    };
    // Unwind: translate each level's sub-answer back up.
    for l in (0..levels.len()).rev() {
        let (a_l, p_l) = &levels[l];
        if a_l <= &val {
            idx = 0;
            val = a_l.clone();
        } else {
            let q_l: &Int = if l == 0 { q } else { &levels[l - 1].1 };
            let s = idx + 1;
            // First j past the s-th wrap: smallest j with a + j p >= s q.
            let j = (q_l * Int::from(s) - a_l).div_ceil(p_l);
            idx = j.to_u64().expect("index below n fits in u64");
        }
    }
    (idx, val)
}

/// Index and numerator of the maximum position among `j = 0..n-1` on the
/// grid (zero included; the maximum is positive whenever `n >= 2`).
pub fn max_position(grid: &OrbitGrid, n: u64) -> Result<(u64, Int)> {
    if n == 0 {
        return Err(Error::Domain("orbit length must be >= 1".into()));
    }
    let l = &grid.grid_den;
    // Maximizing v is minimizing (l - 1 - v), itself a linear-mod sequence.
    let top = l - Int::one();
    let a = (&top - &grid.x_num).mod_floor(l);
    let p = (l - &grid.step_num).mod_floor(l);
    let (j, w) = argmin_mod(&a, &p, l, n);
    Ok((j, top - w))
}

fn check_grid(grid: &OrbitGrid) -> Result<()> {
    let l = &grid.grid_den;
    if l < &Int::from(1)
        || grid.x_num.is_negative()
        || &grid.x_num >= l
        || grid.step_num.is_negative()
        || &grid.step_num >= l
    {
        return Err(Error::Validation(
            "grid requires 0 <= x_num, step_num < grid_den".into(),
        ));
    }
    Ok(())
}

/// The `min(k, #positive)` positions in `(0, 1)` with smallest value among
/// `j = 0..n-1`, ascending — heap-scan oracle. The caller certifies that the
/// `n` positions are pairwise distinct (true for `n <= max_valid_N`).
pub fn k_smallest_positive_oracle(
    grid: &OrbitGrid,
    n: u64,
    k: u64,
) -> Result<Vec<SelectedPoint>> {
    check_grid(grid)?;
    if n == 0 {
        return Err(Error::Domain("orbit length must be >= 1".into()));
    }
    match kernel_for(&grid.grid_den) {
        KernelKind::U64 => oracle_kernel::<u64>(grid, n, k),
        KernelKind::U128 => oracle_kernel::<u128>(grid, n, k),
        KernelKind::Big => oracle_kernel::<Int>(grid, n, k),
    }
}

fn oracle_kernel<K: KernelInt>(grid: &OrbitGrid, n: u64, k: u64) -> Result<Vec<SelectedPoint>> {
    let l = K::from_int(&grid.grid_den).expect("kernel chosen to fit modulus");
    let step = K::from_int(&grid.step_num).expect("step below modulus");
    let zero = K::zero_value();
    let cap = usize::try_from(k.min(n)).map_err(|_| {
        Error::Range(format!("k = {k} too large to materialize on this host"))
    })?;
    if cap == 0 {
        return Ok(Vec::new());
    }
    let mut heap: BinaryHeap<(K, u64)> = BinaryHeap::with_capacity(cap + 1);
    let mut v = K::from_int(&grid.x_num).expect("start below modulus");
    for j in 0..n {
        if v != zero {
            if heap.len() < cap {
                heap.push((v.clone(), j));
            } else if let Some(top) = heap.peek() {
                if (&v, j) < (&top.0, top.1) {
                    heap.pop();
                    heap.push((v.clone(), j));
                }
            }
        }
        if j + 1 < n {
            v = v.add_mod(&step, &l);
        }
    }
    let mut picked = heap.into_vec();
    picked.sort();
    Ok(picked
        .into_iter()
        .map(|(num, index)| SelectedPoint { index, numerator: num.to_int() })
        .collect())
}

/// Same contract as [`k_smallest_positive_oracle`], via the successor walk;
/// falls back to the oracle (with a `log::warn`) if structural validation of
/// the walk fails.
pub fn k_smallest_positive(grid: &OrbitGrid, n: u64, k: u64) -> Result<Vec<SelectedPoint>> {
    check_grid(grid)?;
    if n == 0 {
        return Err(Error::Domain("orbit length must be >= 1".into()));
    }
    let walked = match kernel_for(&grid.grid_den) {
        KernelKind::U64 => successor_walk::<u64>(grid, n, k),
        KernelKind::U128 => successor_walk::<u128>(grid, n, k),
        KernelKind::Big => successor_walk::<Int>(grid, n, k),
    };
    match walked {
        Some(points) => Ok(points),
        None => {
            log::warn!(
                "successor walk failed structural validation (n={n}, k={k}); \
                 falling back to heap oracle"
            );
            k_smallest_positive_oracle(grid, n, k)
        }
    }
}

/// Value-order successor walk; `None` signals a structural violation.
fn successor_walk<K: KernelInt>(grid: &OrbitGrid, n: u64, k: u64) -> Option<Vec<SelectedPoint>> {
    if k == 0 {
        return Some(Vec::new());
    }
    let l = &grid.grid_den;
    if n == 1 {
        return Some(if grid.x_num.is_zero() {
            Vec::new()
        } else {
            vec![SelectedPoint { index: 0, numerator: grid.x_num.clone() }]
        });
    }
    // Zero position present anywhere among the n points?
    let (_, global_min) = argmin_mod(&grid.x_num, &grid.step_num, l, n);
    let n_positive = n - u64::from(global_min.is_zero());
    if n_positive == 0 {
        return Some(Vec::new());
    }
    let k_eff = k.min(n_positive);
    // Minimum positive position: shift values by -1 mod l, which moves an
    // exact zero to the top and keeps positive values in order.
    let shifted = (&grid.x_num - Int::one()).mod_floor(l);
    let (j1, w) = argmin_mod(&shifted, &grid.step_num, l, n);
    if w == l - Int::one() {
        return Some(Vec::new()); // only a zero position exists
    }
    let v1 = &w + Int::one();

    // r: index in [1, n) with minimal positive shift value rv = (r step) mod l.
    let (r0, rv) = argmin_mod(&grid.step_num, &grid.step_num, l, n - 1);
    let r = r0 + 1;
    // s: index in [1, n) with maximal shift value; walking j -> j - s adds
    // `down` = l - (s step mod l) = the argmin value of the reversed step.
    let rev = (l - &grid.step_num).mod_floor(l);
    let (s0, down) = argmin_mod(&rev, &rev, l, n - 1);
    let s = s0 + 1;

    if rv.is_zero() || down.is_zero() || r + s < n {
        return None; // distinctness or three-gap structure violated
    }
    let mid = &rv + &down;
    let middle_nonempty = s > n - r;
    if middle_nonempty && &mid >= l {
        return None;
    }

    let lk = K::from_int(l)?;
    let rv_k = K::from_int(&rv)?;
    let down_k = K::from_int(&down)?;
    let mid_k = if middle_nonempty { K::from_int(&mid)? } else { K::zero_value() };

    let mut out = Vec::with_capacity(usize::try_from(k_eff).ok()?);
    let mut j = j1;
    let mut v = K::from_int(&v1)?;
    out.push(SelectedPoint { index: j, numerator: v.to_int() });
    for _ in 1..k_eff {
        let (nj, nv) = if j < n - r {
            (j + r, v.add_mod(&rv_k, &lk))
        } else if j >= s {
            (j - s, v.add_mod(&down_k, &lk))
        } else {
            (j + r - s, v.add_mod(&mid_k, &lk))
        };
        if nv <= v || nj >= n {
            return None; // walk left the certified value order
        }
        j = nj;
        v = nv;
        out.push(SelectedPoint { index: j, numerator: v.to_int() });
    }
    Some(out)
}

impl RotationContext {
    fn check_selection(&self, n: u64, k: u64) -> Result<()> {
        if n == 0 {
            return Err(Error::Domain("orbit length must be >= 1".into()));
        }
        if n > self.max_valid_n() {
            return Err(Error::Range(format!(
                "N = {n} beyond certified range {}",
                self.max_valid_n()
            )));
        }
        if k > n {
            return Err(Error::Validation(format!("k = {k} exceeds N = {n}")));
        }
        Ok(())
    }

    fn to_points(&self, grid: &OrbitGrid, picked: Vec<SelectedPoint>) -> Vec<OrbitPoint> {
        picked
            .into_iter()
            .map(|p| OrbitPoint {
                index: p.index,
                numerator: p.numerator,
                denominator: grid.grid_den.clone(),
            })
            .collect()
    }

    /// The `min(k, #positive)` orbit points of `{x, ..., R^{N-1}x}` with
    /// smallest positive position, ascending (fast path with oracle
    /// fallback). An exact-zero position is excluded from the ranking.
    pub fn k_smallest_positive(&self, x: &Rat, n: u64, k: u64) -> Result<Vec<OrbitPoint>> {
        self.check_selection(n, k)?;
        let grid = self.orbit_grid(x)?;
        let picked = k_smallest_positive(&grid, n, k)?;
        Ok(self.to_points(&grid, picked))
    }

    /// Oracle variant of [`RotationContext::k_smallest_positive`].
    pub fn k_smallest_positive_oracle(&self, x: &Rat, n: u64, k: u64) -> Result<Vec<OrbitPoint>> {
        self.check_selection(n, k)?;
        let grid = self.orbit_grid(x)?;
        let picked = k_smallest_positive_oracle(&grid, n, k)?;
        Ok(self.to_points(&grid, picked))
    }

    /// The orbit point with minimal positive position (`k = 1` selection);
    /// errors if no positive position exists (only possible for `N = 1`
    /// starting exactly at 0).
    pub fn x_min(&self, x: &Rat, n: u64) -> Result<OrbitPoint> {
        let points = self.k_smallest_positive(x, n, 1)?;
        points.into_iter().next().ok_or_else(|| {
            Error::Domain("no positive position among the requested points".into())
        })
    }

    /// The orbit point with maximal position (the last entry of the
    /// ascending ordering).
    pub fn max_point(&self, x: &Rat, n: u64) -> Result<OrbitPoint> {
        self.check_selection(n, 0)?;
        let grid = self.orbit_grid(x)?;
        let (index, numerator) = max_position(&grid, n)?;
        Ok(OrbitPoint { index, numerator, denominator: grid.grid_den })
    }
}
