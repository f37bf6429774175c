//! Convergent numerators/denominators and the remainder ladder.
//!
//! Index convention (used everywhere in this crate): seeds are
//! `(p_0, q_0) = (1, 0)` and `(p_1, q_1) = (0, 1)`, with
//! `p_{i+1} = a_i p_i + p_{i-1}` and likewise for `q`, so `q_2 = a_1`. The
//! remainder ladder is `delta_n = |q_{n-1} alpha - p_{n-1}|` (so `delta_1 = 1`),
//! which satisfies the exact recursion `a_n delta_{n+1} + delta_{n+2} = delta_n`.

use num_traits::{One, Signed, Zero};

use crate::contfrac::stream::CoefficientStream;
use crate::error::{Error, Result};
use crate::{Int, Rat};

/// Convergent table: rows `0..=depth+1` of `(p_i, q_i)` plus the digits
/// `a_1..a_depth` that generated them.
#[derive(Clone, Debug)]
pub struct ConvergentTable {
    p: Vec<Int>,
    q: Vec<Int>,
    digits: Vec<Int>,
    label: String,
    irrational: bool,
}

impl ConvergentTable {
    /// Materializes rows `0..=depth+1` from the first `depth` digits.
    pub fn build(stream: &mut CoefficientStream, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::Domain("table depth must be >= 1".into()));
        }
        stream.ensure(depth)?;
        let digits: Vec<Int> = stream.materialized()[..depth].to_vec();
        let mut p = vec![Int::one(), Int::zero()];
        let mut q = vec![Int::zero(), Int::one()];
        for (i, a) in digits.iter().enumerate() {
            // row i+2 from rows i+1 and i
            let pn = a * &p[i + 1] + &p[i];
            let qn = a * &q[i + 1] + &q[i];
            p.push(pn);
            q.push(qn);
        }
        debug_assert_eq!(p.len(), depth + 2);
        Ok(ConvergentTable {
            p,
            q,
            digits,
            label: stream.label().to_string(),
            irrational: stream.is_irrational(),
        })
    }

    /// Whether the backing stream describes an irrational value (i.e. is not
    /// a finite rational expansion).
    pub fn is_irrational(&self) -> bool {
        self.irrational
    }

    /// Number of digits backing the table (rows run `0..=depth()+1`).
    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    pub fn p(&self, i: usize) -> &Int {
        &self.p[i]
    }

    pub fn q(&self, i: usize) -> &Int {
        &self.q[i]
    }

    /// Digit `a_n`, 1-based, `n <= depth()`.
    pub fn digit(&self, n: usize) -> &Int {
        &self.digits[n - 1]
    }

    pub fn digits(&self) -> &[Int] {
        &self.digits
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Convergent `p_i / q_i` as an exact rational (`i >= 2`).
    pub fn convergent(&self, i: usize) -> Rat {
        Rat::new(self.p[i].clone(), self.q[i].clone())
    }

    /// The level `n` with `q_n <= N < q_{n+1}`; errors when `N` is not
    /// resolved by the materialized rows.
    pub fn level_of(&self, n_value: &Int) -> Result<usize> {
        if n_value < &Int::one() {
            return Err(Error::Domain("level lookup needs N >= 1".into()));
        }
        if n_value >= &self.q[self.depth() + 1] {
            return Err(Error::Range(format!(
                "N = {n_value} at or beyond q_{} = {}; deepen the table",
                self.depth() + 1,
                self.q[self.depth() + 1]
            )));
        }
        // q_1 = 1 <= N always; find the last index with q_i <= N.
        let mut lvl = 1;
        for i in 2..=self.depth() + 1 {
            if &self.q[i] <= n_value {
                lvl = i;
            } else {
                break;
            }
        }
        Ok(lvl)
    }

    /// Exact sign of `q_n alpha - p_n` under the sign-alternation law:
    /// positive for odd `n`, negative for even `n` (true of every value whose
    /// expansion extends this table's digits).
    pub fn remainder_sign(&self, n: usize) -> i8 {
        if n % 2 == 1 {
            1
        } else {
            -1
        }
    }
}

/// Remainder ladder `delta_n = |q_{n-1} ref - p_{n-1}|` for `n = 1..=depth+1`,
/// computed against an exact rational reference value.
#[derive(Clone, Debug)]
pub struct DeltaTable {
    deltas: Vec<Rat>, // index 0 unused; deltas[n] = delta_n
    valid_to: usize,
}

impl DeltaTable {
    /// Builds the ladder and validates that the reference is consistent with
    /// the table: each signed remainder `q_{n-1} ref - p_{n-1}` must carry the
    /// alternating sign forced by the digit prefix, and be nonzero up to the
    /// table depth.
    pub fn build(table: &ConvergentTable, reference: &Rat) -> Result<Self> {
        let depth = table.depth();
        let mut deltas = vec![Rat::zero()];
        for n in 1..=depth + 1 {
            let signed = Rat::from(table.q(n - 1).clone()) * reference - Rat::from(table.p(n - 1).clone());
            let expect = table.remainder_sign(n - 1);
            let ok = match expect {
                1 => signed.is_positive(),
                _ => signed.is_negative(),
            };
            // The final entry may vanish when the reference is exactly the
            // deepest convergent used as a proxy.
            if !ok && !(n == depth + 1 && signed.is_zero()) {
                return Err(Error::Validation(format!(
                    "reference is inconsistent with the digit prefix at level {n} \
                     (signed remainder {}, expected sign {expect})",
                    crate::util::rat_to_f64(&signed)
                )));
            }
            deltas.push(signed.abs());
        }
        Ok(DeltaTable { deltas, valid_to: depth + 1 })
    }

    /// `delta_n`; valid for `1 <= n <= valid_to()`.
    pub fn delta(&self, n: usize) -> &Rat {
        &self.deltas[n]
    }

    pub fn valid_to(&self) -> usize {
        self.valid_to
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden_table(depth: usize) -> ConvergentTable {
        let mut s = CoefficientStream::from_periodic(vec![], vec![Int::one()]).unwrap();
        ConvergentTable::build(&mut s, depth).unwrap()
    }

    #[test]
    fn golden_denominators_are_fibonacci() {
        let t = golden_table(5);
        let q: Vec<i64> = (0..=6).map(|i| i64::try_from(t.q(i)).unwrap()).collect();
        assert_eq!(q, vec![0, 1, 1, 2, 3, 5, 8]);
        let p: Vec<i64> = (0..=6).map(|i| i64::try_from(t.p(i)).unwrap()).collect();
        assert_eq!(p, vec![1, 0, 1, 1, 2, 3, 5]);
    }

    #[test]
    fn determinant_alternates() {
        let t = golden_table(12);
        for n in 0..=t.depth() {
            let det = t.p(n + 1) * t.q(n) - t.p(n) * t.q(n + 1);
            let expect = if n % 2 == 0 { -1 } else { 1 };
            assert_eq!(det, Int::from(expect), "level {n}");
        }
    }

    #[test]
    fn level_lookup() {
        let t = golden_table(10);
        // q: 0,1,1,2,3,5,8,13,21,34,55,89
        assert_eq!(t.level_of(&Int::from(1)).unwrap(), 2);
        assert_eq!(t.level_of(&Int::from(2)).unwrap(), 3);
        assert_eq!(t.level_of(&Int::from(4)).unwrap(), 4);
        assert_eq!(t.level_of(&Int::from(55)).unwrap(), 10);
        assert!(t.level_of(&Int::from(89)).is_err());
    }

    #[test]
    fn delta_ladder_golden_prefix() {
        // Reference: a deep golden convergent as proxy.
        let deep = golden_table(40);
        let reference = deep.convergent(41);
        let t = golden_table(10);
        let d = DeltaTable::build(&t, &reference).unwrap();
        assert_eq!(d.delta(1), &Rat::from(Int::one()));
        // delta_2 = |q_1 ref - p_1| = ref ~ 0.618; delta_3 = |ref - 1| ~ 0.382.
        let d2 = crate::util::rat_to_f64(d.delta(2));
        let d3 = crate::util::rat_to_f64(d.delta(3));
        assert!((d2 - 0.6180339887).abs() < 1e-9);
        assert!((d3 - 0.3819660112).abs() < 1e-9);
    }

    #[test]
    fn delta_recursion_exact() {
        let deep = golden_table(40);
        let reference = deep.convergent(41);
        let t = golden_table(12);
        let d = DeltaTable::build(&t, &reference).unwrap();
        for n in 1..=t.depth() - 1 {
            let lhs = Rat::from(t.digit(n).clone()) * d.delta(n + 1) + d.delta(n + 2);
            assert_eq!(&lhs, d.delta(n), "recursion at level {n}");
        }
    }

    #[test]
    fn inconsistent_reference_rejected() {
        let t = golden_table(10);
        // 1/2 is not a tail-extension of all-ones digits at depth 10.
        let bad = Rat::new(Int::one(), Int::from(2));
        assert!(DeltaTable::build(&t, &bad).is_err());
    }
}
