//! Numeration of integers in the denominator ladder (Ostrowski expansion).
//!
//! Every `N` with `q_n <= N < q_{n+1}` has a unique digit vector
//! `(b_1, ..., b_n)` with `N = sum_j b_j q_j`, `b_n >= 1`, and every partial
//! sum `sum_{j<=J} b_j q_j < q_{J+1}`. The greedy top-down expansion produces
//! exactly this admissible form.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::contfrac::table::ConvergentTable;
use crate::error::{Error, Result};
use crate::scalar::Kahan;
use crate::Int;

/// Admissible digit vector `(b_1, ..., b_n)` for a specific table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OstrowskiDigits {
    b: Vec<Int>, // b[j-1] = b_j
}

impl OstrowskiDigits {
    /// Digit `b_j`, 1-based.
    pub fn digit(&self, j: usize) -> &Int {
        &self.b[j - 1]
    }

    /// Top level `n` (the length of the vector).
    pub fn top_level(&self) -> usize {
        self.b.len()
    }

    pub fn digits(&self) -> &[Int] {
        &self.b
    }

    /// Wraps an externally supplied digit vector without validation; use
    /// [`ostrowski_value`] to validate and evaluate it.
    pub fn from_raw(b: Vec<Int>) -> Self {
        OstrowskiDigits { b }
    }
}

/// Greedy top-down expansion of `N >= 1`; requires `N < q_{depth+1}`.
pub fn ostrowski_expand(table: &ConvergentTable, n_value: &Int) -> Result<OstrowskiDigits> {
    let level = table.level_of(n_value)?; // also checks N >= 1 and range
    let mut rem = n_value.clone();
    let mut b = vec![Int::zero(); level];
    for j in (1..=level).rev() {
        let (d, r) = rem.div_rem(table.q(j));
        b[j - 1] = d;
        rem = r;
    }
    debug_assert!(rem.is_zero());
    Ok(OstrowskiDigits { b })
}

/// Validates admissibility of a digit vector against the table and returns
/// the encoded integer `sum_j b_j q_j`.
pub fn ostrowski_value(table: &ConvergentTable, digits: &OstrowskiDigits) -> Result<Int> {
    let n = digits.top_level();
    if n == 0 || n > table.depth() {
        return Err(Error::Validation(format!(
            "digit vector length {n} outside 1..={}",
            table.depth()
        )));
    }
    if digits.b.iter().any(|d| d.is_negative()) {
        return Err(Error::Validation("digits must be nonnegative".into()));
    }
    if digits.digit(n) < &Int::one() {
        return Err(Error::Validation("top digit must be >= 1".into()));
    }
    let mut partial = Int::zero();
    for j in 1..=n {
        partial += digits.digit(j) * table.q(j);
        if j < n && &partial >= table.q(j + 1) {
            return Err(Error::Validation(format!(
                "partial sum through level {j} is {partial} >= q_{} = {}",
                j + 1,
                table.q(j + 1)
            )));
        }
    }
    Ok(partial)
}

/// The three aggregate weights of an admissible vector, as compensated f64
/// sums over exact integer weights:
/// `(sum_j b_j q_j ln q_j, sum_{j <= n-1, b_j != 0} a_j q_j ln b_j, sum_j b_j)`.
pub fn weighted_log_sums(table: &ConvergentTable, digits: &OstrowskiDigits) -> (f64, f64, f64) {
    let n = digits.top_level();
    let mut w_q = Kahan::<f64>::new();
    let mut w_b = Kahan::<f64>::new();
    let mut count = Kahan::<f64>::new();
    for j in 1..=n {
        let bj = digits.digit(j);
        if bj.is_zero() {
            continue;
        }
        let weight = (bj * table.q(j)).to_f64().unwrap_or(f64::INFINITY);
        let lnq = crate::util::ln_big(table.q(j));
        w_q.add(weight * lnq);
        if j <= n - 1 {
            let aw = (table.digit(j) * table.q(j)).to_f64().unwrap_or(f64::INFINITY);
            w_b.add(aw * crate::util::ln_big(bj));
        }
        count.add(bj.to_f64().unwrap_or(f64::INFINITY));
    }
    (w_q.value(), w_b.value(), count.value())
}
