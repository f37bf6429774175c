//! Exact arithmetic on real quadratic irrationals `(a + b*sqrt(d)) / c`.
//!
//! Used as an exact reference value for angles given in closed form: digit
//! expansion with period detection, and exact comparisons against rationals
//! (no floating point in any decision).

use num_integer::Integer;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::{Int, Rat};

/// Iteration cap for period detection; reduced states repeat long before
/// this for any input this crate handles.
const PERIOD_SCAN_CAP: usize = 1_000_000;

/// The value `(a + b*sqrt(d)) / c`, stored in lowest terms with `c > 0`,
/// `b != 0`, and `d` a positive non-square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticSurd {
    a: Int,
    b: Int,
    c: Int,
    d: Int,
}

/// Floor of the square root of a nonnegative integer.
pub(crate) fn isqrt(v: &Int) -> Int {
    debug_assert!(!v.is_negative());
    num_integer::Roots::sqrt(v)
}

fn is_square(v: &Int) -> bool {
    if v.is_negative() {
        return false;
    }
    let r = isqrt(v);
    &r * &r == *v
}

impl QuadraticSurd {
    /// Builds `(a + b*sqrt(d)) / c`, rejecting rational or degenerate input.
    pub fn new(a: Int, b: Int, d: Int, c: Int) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::Domain("surd denominator c must be nonzero".into()));
        }
        if b.is_zero() {
            return Err(Error::Domain("surd coefficient b must be nonzero (value would be rational)".into()));
        }
        if d.is_negative() || d.is_zero() || is_square(&d) {
            return Err(Error::Domain(format!(
                "discriminant {d} must be a positive non-square (value would be rational or complex)"
            )));
        }
        let (mut a, mut b, mut c) = (a, b, c);
        if c.is_negative() {
            a = -a;
            b = -b;
            c = -c;
        }
        let g = a.gcd(&b).gcd(&c);
        if !g.is_zero() {
            a /= &g;
            b /= &g;
            c /= &g;
        }
        Ok(QuadraticSurd { a, b, c, d })
    }

    /// Compares the exact value against the rational `r`.
    pub fn cmp_rational(&self, r: &Rat) -> Ordering {
        // (a + b*sqrt(d))/c vs p/q  <=>  b*q*sqrt(d) vs p*c - a*q   (c,q > 0)
        let p = r.numer();
        let q = r.denom();
        debug_assert!(q.is_positive());
        let x = &self.b * q; // coefficient of sqrt(d)
        let y = p * &self.c - &self.a * q;
        match (x.is_negative(), y.is_negative()) {
            (false, true) => Ordering::Greater,
            (true, false) => Ordering::Less,
            (false, false) => (&x * &x * &self.d).cmp(&(&y * &y)),
            (true, true) => (&y * &y).cmp(&(&x * &x * &self.d)),
        }
    }

    /// Exact sign of the value.
    pub fn signum(&self) -> Ordering {
        self.cmp_rational(&Rat::zero())
    }

    /// Exact value of `q*self - p` as a new surd (same discriminant).
    pub fn scale_sub(&self, q: &Int, p: &Int) -> Result<Self> {
        QuadraticSurd::new(
            q * &self.a - p * &self.c,
            q * &self.b,
            self.d.clone(),
            self.c.clone(),
        )
    }

    /// Approximate value for display only; every decision is exact.
    pub fn to_f64(&self) -> f64 {
        let a = crate::util::big_to_f64(&self.a);
        let b = crate::util::big_to_f64(&self.b);
        let c = crate::util::big_to_f64(&self.c);
        let d = crate::util::big_to_f64(&self.d);
        (a + b * d.sqrt()) / c
    }

    /// True when the value lies strictly inside the unit interval.
    pub fn in_unit_interval(&self) -> bool {
        self.signum() == Ordering::Greater
            && self.cmp_rational(&Rat::from_integer(Int::from(1))) == Ordering::Less
    }

    /// Digit expansion of the value (which must lie in `(0,1)`): returns
    /// `(preperiod, cycle)` with the eventually-periodic tail detected
    /// exactly from repeated `(P, Q)` states.
    pub fn expansion(&self) -> Result<(Vec<Int>, Vec<Int>)> {
        if !self.in_unit_interval() {
            return Err(Error::Domain(format!(
                "surd value {:.6} must lie strictly inside (0,1)",
                self.to_f64()
            )));
        }
        // Normal form (P + sqrt(D)) / Q with Q | D - P^2: multiply numerator
        // and denominator by c, fold |b*c| into the radical, and flip signs
        // so the radical's coefficient is +1.
        let bc = &self.b * &self.c;
        let d_big = &bc * &bc * &self.d;
        let s = if bc.is_negative() { Int::from(-1) } else { Int::from(1) };
        let mut p = &self.a * &self.c * &s;
        let mut q = &self.c * &self.c * s;
        debug_assert!(((&d_big - &p * &p) % &q).is_zero());

        // The value is in (0,1); its digits are those of the reciprocal's
        // integer parts, so invert once before iterating.
        let e = (&d_big - &p * &p) / &q;
        q = e;
        p = -p;

        let sqrt_d = isqrt(&d_big);
        let mut seen: std::collections::HashMap<(Int, Int), usize> = std::collections::HashMap::new();
        let mut digits: Vec<Int> = Vec::new();
        for idx in 0..PERIOD_SCAN_CAP {
            if let Some(&start) = seen.get(&(p.clone(), q.clone())) {
                let cycle = digits.split_off(start);
                return Ok((digits, cycle));
            }
            seen.insert((p.clone(), q.clone()), idx);
            let a = floor_p_sqrt_q(&p, &sqrt_d, &q);
            let p_next = &a * &q - &p;
            let q_next = (&d_big - &p_next * &p_next) / &q;
            digits.push(a);
            p = p_next;
            q = q_next;
            if q.is_zero() {
                return Err(Error::Domain("expansion terminated: value is rational".into()));
            }
        }
        Err(Error::Length("period not found within scan cap".into()))
    }
}

/// Exact `floor((P + sqrt(D)) / Q)` given `s = floor(sqrt(D))`, `D` non-square.
fn floor_p_sqrt_q(p: &Int, sqrt_d: &Int, q: &Int) -> Int {
    // sqrt(D) lies strictly between s and s+1, so the quotient lies in an
    // open interval with integer-translate endpoints; the floor is the
    // floor-division of the appropriate endpoint.
    if q.is_positive() {
        (p + sqrt_d).div_floor(q)
    } else {
        (p + sqrt_d + 1u8).div_floor(q)
    }
}
