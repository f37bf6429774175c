//! Digit streams: the single source of truth for an angle's expansion.
//!
//! A stream serves the partial-quotient digits `a_1, a_2, ...` of a value in
//! `(0,1)`. Sources are: a reduced rational (finite, canonical form with last
//! digit >= 2), a quadratic irrational (eventually periodic, served forever),
//! an explicit eventually-periodic rule, or a finite prefix produced by a
//! growth construction (irrational by construction, but only materialized to
//! its construction depth).

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::contfrac::surd::QuadraticSurd;
use crate::error::{Error, Result};
use crate::{Int, Rat};

#[derive(Clone, Debug)]
enum Source {
    /// Finite expansion of a rational; cannot be extended.
    Finite,
    /// Eventually periodic: `pre` then `cycle` repeated forever.
    Periodic { pre: Vec<Int>, cycle: Vec<Int> },
    /// Materialized prefix of a constructed stream; the denominators reached
    /// at each level are kept alongside for exact post-hoc verification.
    Constructed { qs: Vec<Int> },
}

/// Lazily materialized digit sequence `a_1, a_2, ...` of an angle.
#[derive(Clone, Debug)]
pub struct CoefficientStream {
    digits: Vec<Int>,
    source: Source,
    label: String,
}

impl CoefficientStream {
    /// Expansion of the reduced fraction `p/q` in `(0,1)` by the Euclidean
    /// algorithm; the result is canonical (last digit >= 2) automatically.
    pub fn from_rational(p: &Int, q: &Int) -> Result<Self> {
        if p.is_zero() || q.is_zero() {
            return Err(Error::Domain("rational angle must be nonzero".into()));
        }
        if !p.gcd(q).is_one() {
            return Err(Error::Domain(format!("fraction {p}/{q} is reducible; pass lowest terms")));
        }
        if p.is_negative() || q.is_negative() || p >= q {
            return Err(Error::Domain(format!("rational angle {p}/{q} must lie in (0,1)")));
        }
        let mut digits = Vec::new();
        let (mut num, mut den) = (q.clone(), p.clone());
        while !den.is_zero() {
            let (quot, rem) = num.div_rem(&den);
            digits.push(quot);
            num = den;
            den = rem;
        }
        let label = format!("rational {p}/{q}");
        Ok(CoefficientStream { digits, source: Source::Finite, label })
    }

    /// Expansion of a quadratic irrational in `(0,1)`.
    pub fn from_quadratic(surd: &QuadraticSurd) -> Result<Self> {
        let (pre, cycle) = surd.expansion()?;
        let label = format!("surd {:.12}", surd.to_f64());
        Ok(CoefficientStream { digits: Vec::new(), source: Source::Periodic { pre, cycle }, label })
    }

    /// Finite digit list interpreted as a rational angle. The non-canonical
    /// trailing-1 form is accepted and normalized (`[..., x, 1] -> [..., x+1]`).
    pub fn from_digits(list: Vec<Int>) -> Result<Self> {
        if list.is_empty() {
            return Err(Error::Domain("digit list must be nonempty".into()));
        }
        if list.iter().any(|a| a < &Int::one()) {
            return Err(Error::Domain("digits must all be >= 1".into()));
        }
        let mut digits = list;
        if digits.len() >= 2 && digits.last().unwrap().is_one() {
            digits.pop();
            let last = digits.last_mut().unwrap();
            *last += 1u8;
        }
        if digits.len() == 1 && digits[0].is_one() {
            return Err(Error::Domain("digit list [1] denotes 1/1, outside (0,1)".into()));
        }
        let label = format!("digits {}", fmt_digits(&digits));
        Ok(CoefficientStream { digits, source: Source::Finite, label })
    }

    /// Eventually periodic digits `pre` then `cycle` forever (an irrational).
    pub fn from_periodic(pre: Vec<Int>, cycle: Vec<Int>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::Domain("periodic cycle must be nonempty".into()));
        }
        if pre.iter().chain(cycle.iter()).any(|a| a < &Int::one()) {
            return Err(Error::Domain("digits must all be >= 1".into()));
        }
        let label = format!("periodic {}|{}", fmt_digits(&pre), fmt_digits(&cycle));
        Ok(CoefficientStream { digits: Vec::new(), source: Source::Periodic { pre, cycle }, label })
    }

    /// Finite prefix produced by a growth construction, with the denominator
    /// ladder it certified. Not extendable beyond its construction depth.
    pub(crate) fn constructed(digits: Vec<Int>, qs: Vec<Int>, label: String) -> Self {
        CoefficientStream { digits, source: Source::Constructed { qs }, label }
    }

    /// Digit `a_n` (1-based), materializing lazily; errors when the source
    /// is exhausted.
    pub fn digit(&mut self, n: usize) -> Result<Int> {
        self.ensure(n)?;
        Ok(self.digits[n - 1].clone())
    }

    /// Materializes at least `n` digits.
    pub fn ensure(&mut self, n: usize) -> Result<()> {
        if self.digits.len() >= n {
            return Ok(());
        }
        match &self.source {
            Source::Finite | Source::Constructed { .. } => Err(Error::Length(format!(
                "stream '{}' has only {} digits (requested {n})",
                self.label,
                self.digits.len()
            ))),
            Source::Periodic { pre, cycle } => {
                while self.digits.len() < n {
                    let i = self.digits.len();
                    let d = if i < pre.len() {
                        pre[i].clone()
                    } else {
                        cycle[(i - pre.len()) % cycle.len()].clone()
                    };
                    self.digits.push(d);
                }
                Ok(())
            }
        }
    }

    /// Digits materialized so far (prefix `a_1..a_len`).
    pub fn materialized(&self) -> &[Int] {
        &self.digits
    }

    /// Hard length limit, if the source is finite.
    pub fn len_limit(&self) -> Option<usize> {
        match &self.source {
            Source::Finite | Source::Constructed { .. } => Some(self.digits.len()),
            Source::Periodic { .. } => None,
        }
    }

    /// True when the stream denotes an irrational value.
    pub fn is_irrational(&self) -> bool {
        !matches!(self.source, Source::Finite)
    }

    /// Denominator ladder recorded by a construction, if any.
    pub fn construction_qs(&self) -> Option<&[Int]> {
        match &self.source {
            Source::Constructed { qs } => Some(qs),
            _ => None,
        }
    }

    /// Human-readable source description (embedded in reports).
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Stream of the reflected value `1 - x`. Digits transform as
    /// `[a_1, a_2, ...] -> [1, a_1 - 1, a_2, ...]` when `a_1 >= 2`, and
    /// `[1, a_2, a_3, ...] -> [a_2 + 1, a_3, ...]` when `a_1 = 1`; level
    /// indices consequently shift by one. Constructed streams lose one or
    /// gain one digit of depth and keep a recomputed denominator ladder.
    pub fn mirrored(&self) -> Result<CoefficientStream> {
        let label = format!("mirror({})", self.label);
        match &self.source {
            Source::Finite => {
                let v = rational_value(&self.digits)?;
                let num = v.denom() - v.numer();
                let mut s = CoefficientStream::from_rational(&num, v.denom())?;
                s.label = label;
                Ok(s)
            }
            Source::Periodic { pre, cycle } => {
                let digit_at = |i: usize| -> Int {
                    if i < pre.len() {
                        pre[i].clone()
                    } else {
                        cycle[(i - pre.len()) % cycle.len()].clone()
                    }
                };
                let (head, consumed) = if digit_at(0) > Int::one() {
                    (vec![Int::one(), digit_at(0) - Int::one()], 1usize)
                } else {
                    (vec![digit_at(1) + Int::one()], 2usize)
                };
                let mut new_pre = head;
                let (new_pre, new_cycle) = if consumed <= pre.len() {
                    new_pre.extend_from_slice(&pre[consumed..]);
                    (new_pre, cycle.clone())
                } else {
                    let c = (consumed - pre.len()) % cycle.len();
                    let mut rotated = cycle[c..].to_vec();
                    rotated.extend_from_slice(&cycle[..c]);
                    (new_pre, rotated)
                };
                let mut s = CoefficientStream::from_periodic(new_pre, new_cycle)?;
                s.label = label;
                Ok(s)
            }
            Source::Constructed { .. } => {
                if self.digits.len() < 2 {
                    return Err(Error::Length(
                        "mirroring a constructed stream needs >= 2 digits".into(),
                    ));
                }
                let mut digits = Vec::with_capacity(self.digits.len() + 1);
                if self.digits[0] > Int::one() {
                    digits.push(Int::one());
                    digits.push(&self.digits[0] - Int::one());
                    digits.extend_from_slice(&self.digits[1..]);
                } else {
                    digits.push(&self.digits[1] + Int::one());
                    digits.extend_from_slice(&self.digits[2..]);
                }
                let mut qs = vec![Int::zero(), Int::one()];
                for (i, a) in digits.iter().enumerate() {
                    let next = a * &qs[i + 1] + &qs[i];
                    qs.push(next);
                }
                Ok(CoefficientStream::constructed(digits, qs, label))
            }
        }
    }
}

fn fmt_digits(v: &[Int]) -> String {
    let items: Vec<String> = v.iter().map(|d| d.to_string()).collect();
    format!("[{}]", items.join(","))
}

/// Reconstructs the rational value of a finite digit list (used by tests and
/// round-trip validation): `[a_1,...,a_k] -> 1/(a_1 + 1/(a_2 + ...))`.
pub fn rational_value(digits: &[Int]) -> Result<Rat> {
    if digits.is_empty() {
        return Err(Error::Domain("empty digit list has no value".into()));
    }
    let mut value = Rat::zero();
    for a in digits.iter().rev() {
        let denom = Rat::from(a.clone()) + value;
        value = denom.recip();
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    #[test]
    fn euclid_expansion_examples() {
        let s = CoefficientStream::from_rational(&Int::from(5), &Int::from(7)).unwrap();
        assert_eq!(s.materialized(), ints(&[1, 2, 2]).as_slice());
        let s = CoefficientStream::from_rational(&Int::from(3), &Int::from(5)).unwrap();
        assert_eq!(s.materialized(), ints(&[1, 1, 2]).as_slice());
        let s = CoefficientStream::from_rational(&Int::from(1), &Int::from(2)).unwrap();
        assert_eq!(s.materialized(), ints(&[2]).as_slice());
    }

    #[test]
    fn reducible_fraction_rejected() {
        assert!(CoefficientStream::from_rational(&Int::from(2), &Int::from(4)).is_err());
        assert!(CoefficientStream::from_rational(&Int::from(0), &Int::from(3)).is_err());
        assert!(CoefficientStream::from_rational(&Int::from(7), &Int::from(5)).is_err());
    }

    #[test]
    fn trailing_one_normalized() {
        let s = CoefficientStream::from_digits(ints(&[1, 2, 1, 1])).unwrap();
        assert_eq!(s.materialized(), ints(&[1, 2, 2]).as_slice());
    }

    #[test]
    fn periodic_stream_extends_forever() {
        let mut s = CoefficientStream::from_periodic(vec![], ints(&[1, 2, 3])).unwrap();
        assert_eq!(s.digit(7).unwrap(), Int::from(1));
        assert_eq!(s.digit(8).unwrap(), Int::from(2));
        assert!(s.len_limit().is_none());
        assert!(s.is_irrational());
    }

    #[test]
    fn finite_stream_exhausts() {
        let mut s = CoefficientStream::from_rational(&Int::from(5), &Int::from(7)).unwrap();
        assert!(s.digit(3).is_ok());
        assert!(matches!(s.digit(4), Err(Error::Length(_))));
        assert!(!s.is_irrational());
    }

    #[test]
    fn mirrored_rational_is_complement() {
        let s = CoefficientStream::from_rational(&Int::from(3), &Int::from(7)).unwrap();
        let m = s.mirrored().unwrap();
        let v = rational_value(m.materialized()).unwrap();
        assert_eq!(v, Rat::new(Int::from(4), Int::from(7)));
    }

    #[test]
    fn mirrored_periodic_head_transform() {
        // Golden [1,1,1,...] -> [2,1,1,...]; leading-2 case goes back.
        let g = CoefficientStream::from_periodic(vec![], ints(&[1])).unwrap();
        let mut m = g.mirrored().unwrap();
        assert_eq!(m.digit(1).unwrap(), Int::from(2));
        assert_eq!(m.digit(2).unwrap(), Int::from(1));
        let mut back = m.mirrored().unwrap();
        for n in 1..=6 {
            assert_eq!(back.digit(n).unwrap(), Int::one(), "digit {n}");
        }
        // Pre consumed into cycle: [3,2] cycle from pre [] -> head [1,2], cycle
        // rotation by 1 gives [2,3].
        let s = CoefficientStream::from_periodic(vec![], ints(&[3, 2])).unwrap();
        let mut m = s.mirrored().unwrap();
        let got: Vec<Int> = (1..=6).map(|n| m.digit(n).unwrap()).collect();
        assert_eq!(got, ints(&[1, 2, 2, 3, 2, 3]));
    }

    #[test]
    fn digit_list_round_trips_through_value() {
        for (p, q) in [(5i64, 7i64), (3, 5), (1, 2), (355, 452), (89, 144)] {
            let s = CoefficientStream::from_rational(&Int::from(p), &Int::from(q)).unwrap();
            let v = rational_value(s.materialized()).unwrap();
            assert_eq!(v, Rat::new(Int::from(p), Int::from(q)));
        }
    }
}
