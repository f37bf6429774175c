//! Growth windows `lower(q) < q_{n+1} < upper(q)` and the digit-stream
//! constructor that realizes them.
//!
//! Window bounds are products of powers of `q`, `ln(q)` and iterated logs
//! `logk(q)`, written in a small grammar (`q*ln(q)^2`, `q*ln(q)*log3(q)`,
//! `q^(1+g)` with named parameters).  Bounds are evaluated with directed
//! rounding — every floating-point step widens to an enclosing interval — so
//! the integer inequalities derived from them are conclusive.

use num_integer::Integer;
use num_traits::{FromPrimitive, One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

use crate::contfrac::stream::CoefficientStream;
use crate::error::{Error, Result};
use crate::util::big_to_f64;
use crate::Int;

/// Closed interval `[lo, hi]` guaranteed to contain the exact value.
#[derive(Clone, Copy, Debug)]
struct Enclosure {
    lo: f64,
    hi: f64,
}

impl Enclosure {
    fn exact(v: f64) -> Self {
        Enclosure { lo: v, hi: v }
    }

    /// Widens both ends by one ulp; applied after every inexact operation
    /// (and twice after transcendental ones).
    fn widened(self) -> Self {
        Enclosure { lo: self.lo.next_down(), hi: self.hi.next_up() }
    }

    fn mul(self, other: Enclosure) -> Self {
        debug_assert!(self.lo >= 0.0 && other.lo >= 0.0);
        Enclosure { lo: self.lo * other.lo, hi: self.hi * other.hi }.widened()
    }

    fn ln(self) -> Result<Self> {
        if self.lo <= 0.0 {
            return Err(Error::Domain("log of a nonpositive enclosure".into()));
        }
        Ok(Enclosure { lo: self.lo.ln(), hi: self.hi.ln() }.widened().widened())
    }

    fn powf(self, e: f64) -> Result<Self> {
        if self.lo < 0.0 {
            return Err(Error::Domain("power of a negative enclosure".into()));
        }
        let raw = if e >= 0.0 {
            Enclosure { lo: self.lo.powf(e), hi: self.hi.powf(e) }
        } else {
            Enclosure { lo: self.hi.powf(e), hi: self.lo.powf(e) }
        };
        Ok(raw.widened().widened())
    }
}

/// One multiplicative factor of a window expression.
#[derive(Clone, Debug, PartialEq)]
enum Factor {
    /// `q`
    Q,
    /// `ln(q)`
    LnQ,
    /// `logk(q)` = k-fold iterated natural log
    IterLog(usize),
    /// numeric literal
    Const(f64),
}

#[derive(Clone, Debug)]
struct Term {
    factor: Factor,
    exponent: f64,
}

/// A product-of-powers expression in `q`.
#[derive(Clone, Debug)]
pub struct WindowExpr {
    terms: Vec<Term>,
    source: String,
}

impl WindowExpr {
    /// Parses `term ('*' term)*` where `term = base ('^' exponent)?`,
    /// `base = q | ln(q) | logK(q) | number`, and `exponent` is a number or
    /// a parenthesized signed sum of numbers and named parameters.
    pub fn parse(text: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let mut p = Parser { chars: text.chars().collect(), pos: 0, params };
        let terms = p.expr()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(Error::Parse(format!(
                "trailing input at offset {} in window expression {text:?}",
                p.pos
            )));
        }
        Ok(WindowExpr { terms, source: text.to_string() })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Evaluates at integer `q >= 1` with directed rounding.
    fn eval(&self, q: &Int) -> Result<Enclosure> {
        // q itself may exceed 2^53; widen its f64 image unconditionally.
        let qf = big_to_f64(q);
        if !qf.is_finite() {
            return Err(Error::Range(format!("q = {q} too large for bound evaluation")));
        }
        let q_enc = Enclosure { lo: qf, hi: qf }.widened();
        let mut acc = Enclosure::exact(1.0);
        for term in &self.terms {
            let base = match &term.factor {
                Factor::Q => q_enc,
                Factor::LnQ => q_enc.ln()?,
                Factor::IterLog(k) => {
                    let mut v = q_enc;
                    for _ in 0..*k {
                        v = v.ln()?;
                    }
                    v
                }
                Factor::Const(c) => Enclosure::exact(*c),
            };
            let powed =
                if term.exponent == 1.0 { base } else { base.powf(term.exponent)? };
            if powed.lo < 0.0 {
                return Err(Error::Domain(format!(
                    "window factor became negative at q = {q} in {:?}",
                    self.source
                )));
            }
            acc = acc.mul(powed);
        }
        Ok(acc)
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    params: &'a BTreeMap<String, f64>,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected {c:?} at offset {}", self.pos)))
        }
    }

    fn expr(&mut self) -> Result<Vec<Term>> {
        let mut terms = vec![self.term()?];
        while self.eat('*') {
            terms.push(self.term()?);
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<Term> {
        let factor = self.base()?;
        let exponent = if self.eat('^') { self.exponent()? } else { 1.0 };
        Ok(Term { factor, exponent })
    }

    fn base(&mut self) -> Result<Factor> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(Factor::Const(self.number()?)),
            Some(c) if c.is_alphabetic() => {
                let word = self.ident();
                match word.as_str() {
                    "q" => Ok(Factor::Q),
                    "ln" => {
                        self.expect('(')?;
                        self.expect('q')?;
                        self.expect(')')?;
                        Ok(Factor::LnQ)
                    }
                    w if w.starts_with("log") => {
                        let k: usize = w[3..].parse().map_err(|_| {
                            Error::Parse(format!("bad iterated-log factor {w:?}"))
                        })?;
                        if k == 0 || k > 5 {
                            return Err(Error::Parse(format!(
                                "iterated-log depth must be 1..=5, got {k}"
                            )));
                        }
                        self.expect('(')?;
                        self.expect('q')?;
                        self.expect(')')?;
                        Ok(Factor::IterLog(k))
                    }
                    other => Err(Error::Parse(format!("unknown factor {other:?}"))),
                }
            }
            other => Err(Error::Parse(format!("expected a factor, found {other:?}"))),
        }
    }

    fn exponent(&mut self) -> Result<f64> {
        if self.eat('(') {
            let mut total = self.signed_atom(true)?;
            loop {
                match self.peek() {
                    Some('+') => {
                        self.pos += 1;
                        total += self.signed_atom(false)?;
                    }
                    Some('-') => {
                        self.pos += 1;
                        total -= self.signed_atom(false)?;
                    }
                    Some(')') => {
                        self.pos += 1;
                        return Ok(total);
                    }
                    other => {
                        return Err(Error::Parse(format!(
                            "expected '+', '-' or ')' in exponent, found {other:?}"
                        )))
                    }
                }
            }
        } else {
            self.signed_atom(true)
        }
    }

    /// A number or named parameter, optionally sign-prefixed when `lead`.
    fn signed_atom(&mut self, lead: bool) -> Result<f64> {
        let neg = if lead && self.peek() == Some('-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let v = match self.peek() {
            Some(c) if c.is_ascii_digit() => self.number()?,
            Some(c) if c.is_alphabetic() => {
                let name = self.ident();
                *self.params.get(&name).ok_or_else(|| {
                    Error::Parse(format!("unbound parameter {name:?} in window expression"))
                })?
            }
            other => return Err(Error::Parse(format!("expected number or name, found {other:?}"))),
        };
        Ok(if neg { -v } else { v })
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
        {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_ascii_digit() || self.chars[self.pos] == '.')
        {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse()
            .map_err(|e| Error::Parse(format!("bad number {text:?} at offset {start}: {e}")))
    }
}

/// The window `(lower(q), upper(q))`; `upper = None` means unbounded above.
#[derive(Clone, Debug)]
pub struct GrowthWindow {
    lower: WindowExpr,
    upper: Option<WindowExpr>,
}

impl GrowthWindow {
    /// Parses both bounds; `upper` may be `"inf"` for an unbounded window.
    pub fn parse(lower: &str, upper: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let lower = WindowExpr::parse(lower, params)?;
        let upper_trim = upper.trim();
        let upper = if upper_trim.is_empty() || upper_trim == "inf" {
            None
        } else {
            Some(WindowExpr::parse(upper, params)?)
        };
        Ok(GrowthWindow { lower, upper })
    }

    pub fn lower_source(&self) -> &str {
        self.lower.source()
    }

    pub fn upper_source(&self) -> &str {
        self.upper.as_ref().map(|u| u.source()).unwrap_or("inf")
    }

    /// The smallest `q in 2..=2^16` where both bounds evaluate, are
    /// positive, and the window conclusively contains an integer.
    pub fn min_valid_q(&self) -> Result<u64> {
        for q in 2..=(1u64 << 16) {
            let qi = Int::from(q);
            if let Ok((lo, hi)) = self.admissible_range(&qi) {
                match hi {
                    Some(h) if h < lo => continue,
                    _ => return Ok(q),
                }
            }
        }
        Err(Error::Domain(format!(
            "window ({}, {}) has no valid q up to 2^16",
            self.lower_source(),
            self.upper_source()
        )))
    }

    /// The conclusive integer range `[min, max]` (max = `None` when
    /// unbounded) of admissible `q_next` at this `q`: every integer in the
    /// range satisfies `lower(q) < q_next < upper(q)` with certainty.
    pub fn admissible_range(&self, q: &Int) -> Result<(Int, Option<Int>)> {
        let l = self.lower.eval(q)?;
        if !(l.lo > 0.0) {
            return Err(Error::Domain(format!(
                "lower bound {} not conclusively positive at q = {q}",
                self.lower_source()
            )));
        }
        let min = floor_f64(l.hi)? + Int::one();
        let max = match &self.upper {
            None => None,
            Some(u) => {
                let enc = u.eval(q)?;
                Some(ceil_f64(enc.lo)? - Int::one())
            }
        };
        Ok((min, max))
    }

    /// Conclusive verification that `lower(q) < q_next < upper(q)`.
    pub fn verify_level(&self, q: &Int, q_next: &Int) -> Result<bool> {
        let (min, max) = self.admissible_range(q)?;
        Ok(q_next >= &min && max.map_or(true, |m| q_next <= &m))
    }
}

impl fmt::Display for GrowthWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lower_source(), self.upper_source())
    }
}

fn floor_f64(x: f64) -> Result<Int> {
    Int::from_f64(x.floor()).ok_or_else(|| Error::Range(format!("bound {x} not representable")))
}

fn ceil_f64(x: f64) -> Result<Int> {
    Int::from_f64(x.ceil()).ok_or_else(|| Error::Range(format!("bound {x} not representable")))
}

/// Extends `seed` digits until the stream has `depth` digits, choosing each
/// new digit so that the next denominator falls inside the window.
///
/// The digit choice is the admissible integer nearest
/// `ceil((g - q_{n-1}) / q_n)` where `g` is the geometric mean of the two
/// bounds (the minimum admissible digit when the window is unbounded); the
/// resulting denominator is re-verified conclusively at every level.
pub fn construct_alpha_in_window(
    window: &GrowthWindow,
    seed: &[Int],
    depth: usize,
) -> Result<CoefficientStream> {
    if seed.is_empty() {
        return Err(Error::Validation("window construction needs seed digits".into()));
    }
    if depth <= seed.len() {
        return Err(Error::Validation(format!(
            "depth {depth} does not extend the {}-digit seed",
            seed.len()
        )));
    }
    if seed.iter().any(|a| a < &Int::one()) {
        return Err(Error::Validation("seed digits must be >= 1".into()));
    }
    let mut digits = seed.to_vec();
    let mut qs = vec![Int::zero(), Int::one()];
    for (i, a) in digits.iter().enumerate() {
        let next = a * &qs[i + 1] + &qs[i];
        qs.push(next);
    }
    let threshold = Int::from(window.min_valid_q()?);
    if qs[seed.len() + 1] < threshold {
        return Err(Error::Validation(format!(
            "seed denominator {} below window validity threshold {threshold}",
            qs[seed.len() + 1]
        )));
    }

    for level in (seed.len() + 1)..=(depth) {
        // Current top: q_cur = q_{level}, previous q_{level-1}.
        let q_cur = qs[level].clone();
        let q_prev = qs[level - 1].clone();
        let (min_q, max_q) = window.admissible_range(&q_cur).map_err(|e| {
            Error::Construction { level, msg: format!("bound evaluation failed: {e}") }
        })?;
        // Admissible digit interval from the q_next interval.
        let a_lo = {
            let a = ceil_div(&(&min_q - &q_prev), &q_cur);
            if a < Int::one() { Int::one() } else { a }
        };
        let a_hi = max_q.as_ref().map(|m| (m - &q_prev).div_floor(&q_cur));
        if let Some(h) = &a_hi {
            if &a_lo > h {
                return Err(Error::Construction {
                    level,
                    msg: format!(
                        "window {window} admits no digit at q = {q_cur} (needs {a_lo}..={h})"
                    ),
                });
            }
        }
        let a = match (&a_hi, max_q.as_ref()) {
            (Some(h), Some(m)) => {
                // Geometric mean of the conclusive bounds, mapped to a digit.
                let g = (big_to_f64(&min_q) * big_to_f64(m)).sqrt();
                let target = ceil_div(
                    &(&Int::from_f64(g).unwrap_or_else(|| min_q.clone()) - &q_prev),
                    &q_cur,
                );
                target.max(a_lo.clone()).min(h.clone())
            }
            _ => a_lo.clone(),
        };
        let q_next = &a * &q_cur + &q_prev;
        match window.verify_level(&q_cur, &q_next) {
            Ok(true) => {}
            _ => {
                return Err(Error::Construction {
                    level,
                    msg: format!("chosen digit {a} gives q_next = {q_next} outside {window}"),
                })
            }
        }
        digits.push(a);
        qs.push(q_next);
    }
    let label = format!("window{}[seed {} digits]", window, seed.len());
    Ok(CoefficientStream::constructed(digits, qs, label))
}

fn ceil_div(num: &Int, den: &Int) -> Int {
    debug_assert!(den.is_positive());
    num.div_ceil(den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contfrac::table::ConvergentTable;

    fn no_params() -> BTreeMap<String, f64> {
        BTreeMap::new()
    }

    #[test]
    fn parse_and_eval_basic_expressions() {
        let e = WindowExpr::parse("q*ln(q)^2", &no_params()).unwrap();
        let enc = e.eval(&Int::from(1009)).unwrap();
        let expect = 1009.0 * 1009f64.ln().powi(2); // 48267.9...
        assert!(enc.lo <= expect && expect <= enc.hi);
        assert!((enc.hi - enc.lo) < 1e-6 * expect);

        let e2 = WindowExpr::parse("q*ln(q)*log3(q)", &no_params()).unwrap();
        let enc2 = e2.eval(&Int::from(1009)).unwrap();
        let expect2 = 1009.0 * 1009f64.ln() * 1009f64.ln().ln().ln();
        assert!(enc2.lo <= expect2 && expect2 <= enc2.hi);
    }

    #[test]
    fn parse_parameterized_exponent() {
        let mut params = BTreeMap::new();
        params.insert("g".to_string(), 1.0);
        let e = WindowExpr::parse("q^(1+g)", &params).unwrap();
        let enc = e.eval(&Int::from(1009)).unwrap();
        let expect = 1009.0f64.powi(2);
        assert!(enc.lo <= expect && expect <= enc.hi);
        assert!(WindowExpr::parse("q^(1+h)", &params).is_err()); // unbound name
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(WindowExpr::parse("q**ln(q)", &no_params()).is_err());
        assert!(WindowExpr::parse("foo(q)", &no_params()).is_err());
        assert!(WindowExpr::parse("q 2", &no_params()).is_err());
        assert!(WindowExpr::parse("log9(q)", &no_params()).is_err());
    }

    #[test]
    fn admissible_digits_at_small_q() {
        // At q = 1009 (with q_prev = 0 for simplicity of the digit bound),
        // the window (q ln(q) log3(q), q ln(q)^2) spans about (4600, 48268):
        // digits 5..=47 are admissible, and the geometric-mean choice is 14
        // or 15 depending on rounding.
        let w =
            GrowthWindow::parse("q*ln(q)*log3(q)", "q*ln(q)^2", &no_params()).unwrap();
        let q = Int::from(1009);
        let (lo, hi) = w.admissible_range(&q).unwrap();
        let a_lo = ceil_div(&lo, &q);
        let a_hi = hi.unwrap().div_floor(&q);
        assert_eq!(a_lo, Int::from(5));
        assert_eq!(a_hi, Int::from(47));
    }

    #[test]
    fn window_construction_verifies_exactly() {
        let w =
            GrowthWindow::parse("q*ln(q)*log3(q)", "q*ln(q)^2", &no_params()).unwrap();
        // Seed digits reaching q >= 16 (the log3 validity threshold).
        let seed: Vec<Int> = vec![Int::from(16)];
        let mut stream = construct_alpha_in_window(&w, &seed, 6).unwrap();
        let table = ConvergentTable::build(&mut stream, 6).unwrap();
        for n in 2..=6 {
            assert!(
                w.verify_level(table.q(n), table.q(n + 1)).unwrap(),
                "level {n}: q = {}, q_next = {}",
                table.q(n),
                table.q(n + 1)
            );
        }
    }

    #[test]
    fn unbounded_window_picks_minimal_digit() {
        let mut params = BTreeMap::new();
        params.insert("g".to_string(), 1.0);
        let w = GrowthWindow::parse("q^(1+g)", "inf", &params).unwrap();
        let seed: Vec<Int> = vec![Int::from(1008), Int::one()];
        let mut stream = construct_alpha_in_window(&w, &seed, 4).unwrap();
        let table = ConvergentTable::build(&mut stream, 4).unwrap();
        // q_3 = 1009; need q_4 > 1009^2 = 1018081 minimal: a_3 = 1009
        // gives q_4 = 1009 * 1009 + 1008 = 1019089.
        assert_eq!(table.q(3), &Int::from(1009));
        assert_eq!(table.digit(3), &Int::from(1009));
        assert_eq!(table.q(4), &Int::from(1019089));
        assert!(table.q(4) > &(table.q(3) * table.q(3)));
    }

    #[test]
    fn degenerate_window_errors() {
        let w = GrowthWindow::parse("q^2", "q", &no_params()).unwrap();
        let seed: Vec<Int> = vec![Int::from(20)];
        let err = construct_alpha_in_window(&w, &seed, 4);
        assert!(err.is_err());
    }

    #[test]
    fn seed_below_threshold_rejected() {
        let w =
            GrowthWindow::parse("q*ln(q)*log3(q)", "q*ln(q)^2", &no_params()).unwrap();
        let seed: Vec<Int> = vec![Int::from(3)]; // q_2 = 3 < 16
        assert!(matches!(
            construct_alpha_in_window(&w, &seed, 5),
            Err(Error::Validation(_))
        ));
    }
}
