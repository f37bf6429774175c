//! Streaming Birkhoff sums and trimmed Birkhoff sums.
//!
//! The engine walks the certified orbit grid of a [`RotationContext`] with
//! the narrowest integer kernel that fits the grid denominator, evaluates
//! the observable once per point from the *exact* residue (rounded once),
//! and compensates the accumulation.  Trimming removes the `k` largest
//! observable values; because a power observable is strictly decreasing
//! away from each singular endpoint, those values live at the `k` smallest
//! positive positions and (in the two-ended case) the `k` largest
//! positions, which the three-gap successor walk delivers without sorting
//! the whole orbit.
//!
//! Removed values are recomputed from their exact residues through the same
//! rounding pipeline as the streamed total, so `trimmed = total - removed`
//! holds bit-for-bit against an independent re-run.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::diophantine::TrimmingSequence;
use crate::error::{Error, Result};
use crate::observables::{PowerObservable, TruncatedObservable};
use crate::orbit::{
    k_smallest_positive, kernel_for, KernelInt, KernelKind, OrbitGrid, RotationContext,
};
use crate::scalar::{Kahan, Real};
use crate::util::{big_to_f64, ln_big, serde_rat};
use crate::{Int, Rat};

/// Largest removal buffer a profile run will allocate before refusing.
const PROFILE_K_CAP: u64 = 10_000_000;

/// One trimmed-sum evaluation: the full sum, the trimmed sum, and the
/// removed points that connect them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrimmedSumResult {
    /// Number of orbit points summed.
    pub n: u64,
    /// Effective trimming count (the request is clamped to `n`).
    pub k: u64,
    /// Base point of the orbit.
    #[serde(with = "serde_rat")]
    pub x: Rat,
    /// Fingerprint of the rotation context the sum was taken over.
    pub angle_fingerprint: String,
    /// Full Birkhoff sum of the observable over the `n` points.
    pub total: f64,
    /// Compensation residual of the total (magnitude of the rounding error
    /// the compensated accumulator absorbed).
    pub residual: f64,
    /// Sum after removing the `k` largest values.
    pub trimmed: f64,
    /// The removed values, descending; ties broken toward the earlier orbit
    /// index.
    pub removed_values: Vec<f64>,
    /// Orbit indices of the removed values, aligned with `removed_values`.
    pub removed_times: Vec<u64>,
}

/// Shared value pipeline: the exact grid residue is rounded once, the same
/// way, whether a point is met by the streaming total or revisited as a
/// removed point.  Grids whose denominator overflows `f64` switch to a log
/// evaluation so tiny positions saturate to huge values instead of rounding
/// to a spurious `f(0) = 0`.
struct GridEval<'a, R: Real> {
    obs: &'a PowerObservable<R>,
    l_f: f64,
    l_ln: f64,
    log_space: bool,
}

impl<'a, R: Real> GridEval<'a, R> {
    fn new(obs: &'a PowerObservable<R>, l: &Int) -> Self {
        let l_f = big_to_f64(l);
        GridEval { obs, l_f, l_ln: ln_big(l), log_space: !l_f.is_finite() }
    }

    /// Observable value at residue `v`, with `m = L - v` supplied by the
    /// caller (both are exact kernel integers).
    fn value<K: KernelInt>(&self, v: &K, m: &K) -> f64 {
        if *v == K::zero_value() {
            return 0.0;
        }
        if self.log_space {
            self.obs.eval_from_logs(v.ln_value() - self.l_ln, m.ln_value() - self.l_ln)
        } else if self.obs.two_sided() {
            self.obs.eval_split_f64(v.to_f64() / self.l_f, m.to_f64() / self.l_f)
        } else {
            self.obs.eval_f64(v.to_f64() / self.l_f)
        }
    }
}

fn check_length(ctx: &RotationContext, n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("orbit length must be >= 1".into()));
    }
    if n > ctx.max_valid_n() {
        return Err(Error::Range(format!(
            "orbit length {n} exceeds the certified range {} of this context",
            ctx.max_valid_n()
        )));
    }
    Ok(())
}

/// Full Birkhoff sum `S_N(f)(x)` of a power observable along the orbit.
///
/// The accumulation is compensated binary64 internally; the result is
/// rounded into the requested scalar lane at the end.
pub fn birkhoff_sum<R: Real>(
    ctx: &RotationContext,
    obs: &PowerObservable<R>,
    x: &Rat,
    n: u64,
) -> Result<R> {
    check_length(ctx, n)?;
    let grid = ctx.orbit_grid(x)?;
    let kah = match kernel_for(&grid.grid_den) {
        KernelKind::U64 => stream_total::<u64, R>(&grid, obs, n).0,
        KernelKind::U128 => stream_total::<u128, R>(&grid, obs, n).0,
        KernelKind::Big => stream_total::<Int, R>(&grid, obs, n).0,
    };
    Ok(R::from_f64_lossy(kah.value()))
}

/// Streams the `n` points once; returns the compensated total and the index
/// of the orbit point sitting exactly at `0`, if any (there is at most one,
/// because grid positions are pairwise distinct within the certified range).
fn stream_total<K: KernelInt, R: Real>(
    grid: &OrbitGrid,
    obs: &PowerObservable<R>,
    n: u64,
) -> (Kahan<f64>, Option<u64>) {
    let ev = GridEval::new(obs, &grid.grid_den);
    let l = K::from_int(&grid.grid_den).expect("kernel chosen to fit the grid denominator");
    let step = K::from_int(&grid.step_num).expect("step residue fits the grid denominator");
    let mut v = K::from_int(&grid.x_num).expect("base residue fits the grid denominator");
    let mut total = Kahan::new();
    let mut zero_idx = None;
    for j in 0..n {
        if v == K::zero_value() {
            zero_idx = Some(j);
        }
        let m = v.mod_neg(&l);
        total.add(ev.value(&v, &m));
        if j + 1 < n {
            v = v.add_mod(&step, &l);
        }
    }
    (total, zero_idx)
}

/// Mirror image of a grid: positions `v` become `L - v`.  Walking the
/// mirror's smallest positive positions visits the original's largest ones.
fn mirror_grid(grid: &OrbitGrid) -> OrbitGrid {
    let x_num = if grid.x_num.is_zero() {
        Int::zero()
    } else {
        &grid.grid_den - &grid.x_num
    };
    OrbitGrid {
        x_num,
        step_num: &grid.grid_den - &grid.step_num,
        grid_den: grid.grid_den.clone(),
    }
}

/// Ranks candidate points by observable value (descending, ties toward the
/// earlier index), keeps `k_eff`, pads with the zero-position point when
/// fewer than `k_eff` positive positions exist, and sums what was kept.
///
/// Candidates must contain every point whose value can reach the top
/// `k_eff`; duplicates (by index) are allowed and removed here.
fn finalize_removed<K: KernelInt, R: Real>(
    ev: &GridEval<R>,
    l: &K,
    mut cands: Vec<(u64, K)>,
    k_eff: u64,
    zero_idx: Option<u64>,
) -> (Vec<u64>, Vec<f64>, f64) {
    cands.sort_by_key(|c| c.0);
    cands.dedup_by_key(|c| c.0);
    let mut valued: Vec<(u64, f64)> = cands
        .into_iter()
        .map(|(j, v)| {
            let m = v.mod_neg(l);
            (j, ev.value(&v, &m))
        })
        .collect();
    valued.sort_by(|a, b| {
        b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then_with(|| a.0.cmp(&b.0))
    });
    valued.truncate(usize::try_from(k_eff).unwrap_or(usize::MAX));
    if (valued.len() as u64) < k_eff {
        if let Some(z) = zero_idx {
            valued.push((z, 0.0));
        }
    }
    let mut acc = Kahan::new();
    for &(_, value) in &valued {
        acc.add(value);
    }
    let times = valued.iter().map(|&(j, _)| j).collect();
    let values = valued.iter().map(|&(_, v)| v).collect();
    (times, values, acc.value())
}

fn trimmed_from_grid<K: KernelInt, R: Real>(
    grid: &OrbitGrid,
    obs: &PowerObservable<R>,
    n: u64,
    k_eff: u64,
) -> Result<TrimmedSumResult> {
    let ev = GridEval::new(obs, &grid.grid_den);
    let l = K::from_int(&grid.grid_den).expect("kernel chosen to fit the grid denominator");
    let (total, zero_idx) = stream_total::<K, R>(grid, obs, n);
    let mut cands: Vec<(u64, K)> = Vec::new();
    if k_eff > 0 {
        for p in k_smallest_positive(grid, n, k_eff)? {
            cands.push((p.index, K::from_int(&p.numerator).expect("residue fits the kernel")));
        }
        if obs.two_sided() {
            let mirrored = mirror_grid(grid);
            for p in k_smallest_positive(&mirrored, n, k_eff)? {
                let back = &mirrored.grid_den - &p.numerator;
                cands.push((p.index, K::from_int(&back).expect("residue fits the kernel")));
            }
        }
    }
    let (removed_times, removed_values, removed_sum) =
        finalize_removed(&ev, &l, cands, k_eff, zero_idx);
    let positives = n - u64::from(zero_idx.is_some());
    // Removing every positive value leaves only the point at zero (if any),
    // so the trimmed sum is exactly zero by definition.
    let trimmed = if k_eff >= positives { 0.0 } else { total.value() - removed_sum };
    Ok(TrimmedSumResult {
        n,
        k: k_eff,
        x: Rat::zero(),
        angle_fingerprint: String::new(),
        total: total.value(),
        residual: total.residual(),
        trimmed,
        removed_values,
        removed_times,
    })
}

/// Trimmed Birkhoff sum `S_N^k(f)(x)`: the full sum minus its `k` largest
/// terms.  Requests with `k >= N` clamp to `k = N` and return `0` exactly.
pub fn trimmed_sum(
    ctx: &RotationContext,
    obs: &PowerObservable<f64>,
    x: &Rat,
    n: u64,
    k: u64,
) -> Result<TrimmedSumResult> {
    check_length(ctx, n)?;
    let grid = ctx.orbit_grid(x)?;
    let k_eff = k.min(n);
    let mut out = match kernel_for(&grid.grid_den) {
        KernelKind::U64 => trimmed_from_grid::<u64, f64>(&grid, obs, n, k_eff),
        KernelKind::U128 => trimmed_from_grid::<u128, f64>(&grid, obs, n, k_eff),
        KernelKind::Big => trimmed_from_grid::<Int, f64>(&grid, obs, n, k_eff),
    }?;
    out.x = x.clone();
    out.angle_fingerprint = ctx.fingerprint();
    Ok(out)
}

/// One row of a trimmed-sum profile: the trimmed sum at a grid length,
/// already divided by the caller's normalizing scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    /// Orbit length at this grid point.
    pub n: u64,
    /// Trimming count applied at this length.
    pub k: u64,
    /// Full Birkhoff sum over the first `n` points.
    pub total: f64,
    /// Trimmed sum over the first `n` points.
    pub trimmed: f64,
    /// Normalizing scale `d(n, k)` supplied by the caller.
    pub scale: f64,
    /// `trimmed / scale`.
    pub ratio: f64,
}

/// Capped max-heap insert: keeps the `cap` smallest entries seen so far.
fn push_capped<T: Ord>(heap: &mut BinaryHeap<T>, item: T, cap: usize) {
    heap.push(item);
    if heap.len() > cap {
        heap.pop();
    }
}

fn profile_from_grid<K: KernelInt>(
    grid: &OrbitGrid,
    obs: &PowerObservable<f64>,
    n_grid: &[u64],
    ks: &[u64],
    scale: &dyn Fn(u64, u64) -> Result<f64>,
) -> Result<Vec<ProfileRow>> {
    let ev = GridEval::new(obs, &grid.grid_den);
    let l = K::from_int(&grid.grid_den).expect("kernel chosen to fit the grid denominator");
    let step = K::from_int(&grid.step_num).expect("step residue fits the grid denominator");
    let n_max = *n_grid.last().expect("grid validated nonempty");
    let k_cap = ks.iter().copied().max().unwrap_or(0).min(n_max);
    if k_cap > PROFILE_K_CAP {
        return Err(Error::Budget(format!(
            "profile trimming count {k_cap} exceeds the removal buffer cap {PROFILE_K_CAP}"
        )));
    }
    let cap = usize::try_from(k_cap).expect("cap bounded above");
    let two = obs.two_sided();
    let mut left: BinaryHeap<(K, u64)> = BinaryHeap::new();
    let mut right: BinaryHeap<(K, u64)> = BinaryHeap::new();
    let mut total = Kahan::new();
    let mut zero_idx = None;
    let mut rows = Vec::with_capacity(n_grid.len());
    let mut gi = 0;
    let mut v = K::from_int(&grid.x_num).expect("base residue fits the grid denominator");
    for j in 0..n_max {
        let m = v.mod_neg(&l);
        if v == K::zero_value() {
            zero_idx = Some(j);
        } else if cap > 0 {
            push_capped(&mut left, (v.clone(), j), cap);
            if two {
                push_capped(&mut right, (m.clone(), j), cap);
            }
        }
        total.add(ev.value(&v, &m));
        while gi < n_grid.len() && n_grid[gi] == j + 1 {
            let n_i = n_grid[gi];
            let k_i = ks[gi].min(n_i);
            let take = usize::try_from(k_i).expect("bounded by cap");
            let mut cands: Vec<(u64, K)> = left
                .clone()
                .into_sorted_vec()
                .into_iter()
                .take(take)
                .map(|(res, idx)| (idx, res))
                .collect();
            if two {
                cands.extend(
                    right
                        .clone()
                        .into_sorted_vec()
                        .into_iter()
                        .take(take)
                        .map(|(res, idx)| (idx, res.mod_neg(&l))),
                );
            }
            let (_, _, removed_sum) = finalize_removed(&ev, &l, cands, k_i, zero_idx);
            let positives = n_i - u64::from(zero_idx.is_some());
            let trimmed = if k_i >= positives { 0.0 } else { total.value() - removed_sum };
            let scale_v = scale(n_i, k_i)?;
            rows.push(ProfileRow {
                n: n_i,
                k: k_i,
                total: total.value(),
                trimmed,
                scale: scale_v,
                ratio: trimmed / scale_v,
            });
            gi += 1;
        }
        if j + 1 < n_max {
            v = v.add_mod(&step, &l);
        }
    }
    Ok(rows)
}

/// Trimmed sums along an increasing grid of orbit lengths in one orbit
/// pass, with the trimming count supplied by a rule and each row normalized
/// by `scale(n, k)`.
///
/// Produces exactly the values that independent [`trimmed_sum`] calls at
/// each grid length would, but streams the orbit once, maintaining capped
/// heaps of the extreme positions instead of re-walking per length.
pub fn trimmed_profile(
    ctx: &RotationContext,
    obs: &PowerObservable<f64>,
    x: &Rat,
    n_grid: &[u64],
    trim: &TrimmingSequence,
    scale: &dyn Fn(u64, u64) -> Result<f64>,
) -> Result<Vec<ProfileRow>> {
    if n_grid.is_empty() {
        return Err(Error::Validation("profile grid must be nonempty".into()));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation("profile grid must be strictly increasing".into()));
    }
    check_length(ctx, *n_grid.last().expect("nonempty"))?;
    if n_grid[0] == 0 {
        return Err(Error::Domain("orbit length must be >= 1".into()));
    }
    let ks: Vec<u64> = n_grid
        .iter()
        .map(|&n| {
            let k = trim.k(&Int::from(n))?;
            num_traits::ToPrimitive::to_u64(&k)
                .ok_or_else(|| Error::Range(format!("trimming count at n = {n} overflows u64")))
        })
        .collect::<Result<Vec<_>>>()?;
    let grid = ctx.orbit_grid(x)?;
    match kernel_for(&grid.grid_den) {
        KernelKind::U64 => profile_from_grid::<u64>(&grid, obs, n_grid, &ks, scale),
        KernelKind::U128 => profile_from_grid::<u128>(&grid, obs, n_grid, &ks, scale),
        KernelKind::Big => profile_from_grid::<Int>(&grid, obs, n_grid, &ks, scale),
    }
}

/// Birkhoff sum of a truncated observable, streamed with exact threshold
/// comparisons: a point contributes iff its residue `v` satisfies
/// `t <= v/L` (and `v/L <= 1 - t` for two-ended truncation), decided in
/// integer arithmetic before any rounding.
pub fn truncated_birkhoff_sum(
    ctx: &RotationContext,
    trunc: &TruncatedObservable<f64>,
    x: &Rat,
    n: u64,
) -> Result<(f64, f64)> {
    check_length(ctx, n)?;
    let grid = ctx.orbit_grid(x)?;
    match kernel_for(&grid.grid_den) {
        KernelKind::U64 => truncated_from_grid::<u64>(&grid, trunc, n),
        KernelKind::U128 => truncated_from_grid::<u128>(&grid, trunc, n),
        KernelKind::Big => truncated_from_grid::<Int>(&grid, trunc, n),
    }
}

fn truncated_from_grid<K: KernelInt>(
    grid: &OrbitGrid,
    trunc: &TruncatedObservable<f64>,
    n: u64,
) -> Result<(f64, f64)> {
    use num_integer::Integer as _;
    let obs = trunc.base();
    let ev = GridEval::new(obs, &grid.grid_den);
    let l = K::from_int(&grid.grid_den).expect("kernel chosen to fit the grid denominator");
    let step = K::from_int(&grid.step_num).expect("step residue fits the grid denominator");
    // v/L >= t  <=>  v >= ceil(L * t).
    let t = trunc.threshold();
    let low_int = (&grid.grid_den * t.numer()).div_ceil(t.denom());
    let low = K::from_int(&low_int).unwrap_or_else(|| l.clone());
    // v/L <= end  <=>  v <= floor(L * end).
    let end = trunc.support_end();
    let high_int = (&grid.grid_den * end.numer()).div_floor(end.denom());
    let high = K::from_int(&high_int).unwrap_or_else(|| l.clone());
    let mut v = K::from_int(&grid.x_num).expect("base residue fits the grid denominator");
    let mut total = Kahan::new();
    for j in 0..n {
        if v >= low && v <= high {
            let m = v.mod_neg(&l);
            total.add(ev.value(&v, &m));
        }
        if j + 1 < n {
            v = v.add_mod(&step, &l);
        }
    }
    Ok((total.value(), total.residual()))
}
