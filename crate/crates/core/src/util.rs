//! Small numeric helpers shared across modules.

use num_traits::{Signed, ToPrimitive, Zero};

use crate::{Int, Rat};

/// `f64` value of a big integer; saturates to +/- infinity far beyond the
/// `f64` range (callers treat that as "too large to matter approximately").
pub fn big_to_f64(v: &Int) -> f64 {
    v.to_f64().unwrap_or(if v.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

/// Accurately rounded `f64` value of an exact rational.
pub fn rat_to_f64(v: &Rat) -> f64 {
    v.to_f64().unwrap_or_else(|| big_to_f64(v.numer()) / big_to_f64(v.denom()))
}

/// Natural log of a positive big integer, valid far beyond the `f64` range:
/// splits off the bit length and takes the log of the leading 64 bits.
pub fn ln_big(v: &Int) -> f64 {
    debug_assert!(v.is_positive() || v.is_zero());
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    if bits <= 1023 {
        return big_to_f64(v).ln();
    }
    let shift = bits - 64;
    let top: Int = v >> shift;
    big_to_f64(&top).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational.
pub fn ln_rat(v: &Rat) -> f64 {
    ln_big(v.numer()) - ln_big(v.denom())
}

/// Ceiling that forgives sub-relative-epsilon float noise: values within
/// `1e-9` (relative) of an integer snap to it before rounding up, so e.g.
/// `exp(0.5 ln 100) = 10.000000000000002` ceils to 10, not 11.
pub fn fuzzy_ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

/// Serde adapter: big integers as decimal strings (JSON numbers cannot hold
/// them losslessly).
pub mod serde_int {
    use super::Int;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &Int, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Int, D::Error> {
        let text = String::deserialize(d)?;
        Int::from_str(&text).map_err(D::Error::custom)
    }
}

/// Serde adapter: exact rationals as `"numerator/denominator"` strings.
pub mod serde_rat {
    use super::Rat;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", v.numer(), v.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let text = String::deserialize(d)?;
        let (n, den) = text
            .split_once('/')
            .ok_or_else(|| D::Error::custom("expected \"num/den\""))?;
        Ok(Rat::new(
            super::Int::from_str(n.trim()).map_err(D::Error::custom)?,
            super::Int::from_str(den.trim()).map_err(D::Error::custom)?,
        ))
    }
}

/// Serde adapter: vectors of big integers as decimal strings.
pub mod serde_int_vec {
    use super::Int;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &[Int], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Int>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .into_iter()
            .map(|t| Int::from_str(&t).map_err(D::Error::custom))
            .collect()
    }
}

/// SplitMix64: tiny, stable, seedable generator for deterministic sample
/// designs (not used for anything statistical beyond stratified offsets).
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `[0, bound)`; `bound >= 1`.
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound >= 1);
        // Modulo bias is irrelevant for offset-jitter purposes.
        self.next_u64() % bound
    }
}
