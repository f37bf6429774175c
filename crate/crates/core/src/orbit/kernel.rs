//! Integer kernels for orbit arithmetic.
//!
//! Positions are residues modulo the grid denominator `L`.  The additive
//! stepping loop runs over one of three kernel widths picked from the bit
//! size of `L`: `u64` (L < 2^63), `u128` (L < 2^127), or arbitrary
//! precision.  The narrow kernels keep the hot loop allocation-free.

use num_traits::{ToPrimitive, Zero};

use crate::Int;

/// Residue arithmetic with enough headroom for `a + b` of values `< m`.
pub trait KernelInt: Clone + Ord + std::fmt::Debug {
    fn from_int(v: &Int) -> Option<Self>;
    fn to_int(&self) -> Int;
    fn zero_value() -> Self;
    /// `(self + other) mod m`, given `self, other < m`.
    fn add_mod(&self, other: &Self, m: &Self) -> Self;
    /// `(self * other) mod m`; not on the hot path.
    fn mul_mod(&self, other: &Self, m: &Self) -> Self;
    /// `(m - self) mod m`, i.e. the mirrored residue, given `self < m`.
    fn mod_neg(&self, m: &Self) -> Self;
    /// Nearest `f64` (small values convert exactly; large ones round).
    fn to_f64(&self) -> f64;
    /// Natural log as `f64`, exact-ish even when the value itself overflows
    /// `f64`.  Callers must not pass zero.
    fn ln_value(&self) -> f64;
}

impl KernelInt for u64 {
    fn from_int(v: &Int) -> Option<Self> {
        // Reject the top bit: add_mod needs `a + b` to fit.
        v.to_u64().filter(|x| *x < (1 << 63))
    }

    fn to_int(&self) -> Int {
        Int::from(*self)
    }

    fn zero_value() -> Self {
        0
    }

    #[inline(always)]
    fn add_mod(&self, other: &Self, m: &Self) -> Self {
        let s = self + other;
        if s >= *m {
            s - m
        } else {
            s
        }
    }

    fn mul_mod(&self, other: &Self, m: &Self) -> Self {
        ((*self as u128 * *other as u128) % *m as u128) as u64
    }

    #[inline(always)]
    fn mod_neg(&self, m: &Self) -> Self {
        if *self == 0 {
            0
        } else {
            m - self
        }
    }

    #[inline(always)]
    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn ln_value(&self) -> f64 {
        (*self as f64).ln()
    }
}

impl KernelInt for u128 {
    fn from_int(v: &Int) -> Option<Self> {
        v.to_u128().filter(|x| *x < (1 << 127))
    }

    fn to_int(&self) -> Int {
        Int::from(*self)
    }

    fn zero_value() -> Self {
        0
    }

    #[inline(always)]
    fn add_mod(&self, other: &Self, m: &Self) -> Self {
        let s = self + other;
        if s >= *m {
            s - m
        } else {
            s
        }
    }

    fn mul_mod(&self, other: &Self, m: &Self) -> Self {
        // 128x128 products overflow; route through arbitrary precision.
        let prod = Int::from(*self) * Int::from(*other);
        (prod % Int::from(*m)).to_u128().expect("residue fits the modulus width")
    }

    #[inline(always)]
    fn mod_neg(&self, m: &Self) -> Self {
        if *self == 0 {
            0
        } else {
            m - self
        }
    }

    #[inline(always)]
    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn ln_value(&self) -> f64 {
        (*self as f64).ln()
    }
}

impl KernelInt for Int {
    fn from_int(v: &Int) -> Option<Self> {
        Some(v.clone())
    }

    fn to_int(&self) -> Int {
        self.clone()
    }

    fn zero_value() -> Self {
        Int::zero()
    }

    #[inline]
    fn add_mod(&self, other: &Self, m: &Self) -> Self {
        let s = self + other;
        if &s >= m {
            s - m
        } else {
            s
        }
    }

    fn mul_mod(&self, other: &Self, m: &Self) -> Self {
        (self * other) % m
    }

    fn mod_neg(&self, m: &Self) -> Self {
        if self.is_zero() {
            Int::zero()
        } else {
            m - self
        }
    }

    fn to_f64(&self) -> f64 {
        crate::util::big_to_f64(self)
    }

    fn ln_value(&self) -> f64 {
        crate::util::ln_big(self)
    }
}

/// Which kernel a given modulus needs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    U64,
    U128,
    Big,
}

pub fn kernel_for(m: &Int) -> KernelKind {
    if <u64 as KernelInt>::from_int(m).is_some() {
        KernelKind::U64
    } else if <u128 as KernelInt>::from_int(m).is_some() {
        KernelKind::U128
    } else {
        KernelKind::Big
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_mod_wraps() {
        assert_eq!(5u64.add_mod(&4, &7), 2);
        assert_eq!(3u64.add_mod(&3, &7), 6);
        assert_eq!(5u128.add_mod(&4, &7), 2);
        assert_eq!(Int::from(5).add_mod(&Int::from(4), &Int::from(7)), Int::from(2));
    }

    #[test]
    fn mod_neg_mirrors_and_fixes_zero() {
        assert_eq!(3u64.mod_neg(&7), 4);
        assert_eq!(0u64.mod_neg(&7), 0);
        assert_eq!(3u128.mod_neg(&7), 4);
        assert_eq!(Int::from(3).mod_neg(&Int::from(7)), Int::from(4));
        assert_eq!(Int::zero().mod_neg(&Int::from(7)), Int::zero());
    }

    #[test]
    fn mul_mod_matches_bigint() {
        let big = u64::MAX >> 1;
        let m = big - 2;
        let a = big - 11;
        // a, m do not fit a u64 product; check against exact arithmetic.
        let expect = (Int::from(a) * Int::from(a)) % Int::from(m);
        assert_eq!(Int::from(a.mul_mod(&a, &m)), expect);
        let a128 = u128::from(u64::MAX) * 7 + 3;
        let m128 = u128::from(u64::MAX) * 11 + 5;
        let expect128 = (Int::from(a128) * Int::from(a128)) % Int::from(m128);
        assert_eq!(Int::from(a128.mul_mod(&a128, &m128)), expect128);
    }

    #[test]
    fn kernel_selection_by_width() {
        assert_eq!(kernel_for(&Int::from(1000)), KernelKind::U64);
        assert_eq!(kernel_for(&(Int::from(1) << 100)), KernelKind::U128);
        assert_eq!(kernel_for(&(Int::from(1) << 200)), KernelKind::Big);
    }
}
