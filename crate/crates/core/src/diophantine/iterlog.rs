//! Iterated natural logarithms `log_k` with explicit domain checking.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `log_1(x) = ln x`, `log_k(x) = ln(log_{k-1}(x))`.
///
/// Every intermediate value fed to `ln` must be strictly positive; the
/// *final* value may be zero or negative (e.g. `log_2(2) < 0`).  An
/// undefined level is a hard error, never a silent `-inf`/NaN.
pub fn iterated_log<R: Real>(k: usize, x: R) -> Result<R> {
    if k == 0 {
        return Err(Error::Domain("iterated log needs k >= 1".into()));
    }
    let mut v = x;
    for level in 1..=k {
        if v <= R::zero() {
            return Err(Error::Domain(format!(
                "log_{k} undefined: argument of level {level} is {v} <= 0"
            )));
        }
        v = v.ln();
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_level_is_ln() {
        assert!((iterated_log(1, std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn double_log_of_e_to_e() {
        let x = std::f64::consts::E.powf(std::f64::consts::E);
        assert!((iterated_log(2, x).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn triple_log_of_million() {
        // ln(ln(ln 1e6)) = ln(ln 13.8155...) = ln(2.62579...) = 0.96545...
        let v: f64 = iterated_log(3, 1.0e6).unwrap();
        assert!((v - 0.9654).abs() < 5e-4, "got {v}");
    }

    #[test]
    fn negative_final_value_is_fine() {
        let v: f64 = iterated_log(2, 2.0).unwrap();
        assert!(v < 0.0);
    }

    #[test]
    fn undefined_level_errors() {
        assert!(iterated_log(2, 1.0f64).is_err()); // ln 1 = 0, next level undefined
        assert!(iterated_log(1, 0.0f64).is_err());
        assert!(iterated_log(1, -3.0f64).is_err());
    }

    #[test]
    fn strictly_increasing_on_domain() {
        // Spot property: log_k increasing for k <= 5 on a grid inside its
        // domain.  The domain floor is where log_{k-1}(x) = 0.05, i.e.
        // 0.05 exponentiated k-1 times (about 3.8e7 for k = 5).
        for k in 1..=5usize {
            let mut floor = 0.05f64;
            for _ in 1..k {
                floor = floor.exp();
            }
            let mut prev = f64::NEG_INFINITY;
            for i in 0..50 {
                let x = floor * (1.0 + 0.37 * i as f64);
                let v = iterated_log(k, x).unwrap();
                assert!(v > prev, "log_{k} not increasing at x = {x}");
                prev = v;
            }
        }
    }

    #[test]
    fn works_for_f32() {
        let v: f32 = iterated_log(2, 1.0e6f32).unwrap();
        assert!((v as f64 - (1.0e6f64.ln()).ln()).abs() < 1e-5);
    }
}
