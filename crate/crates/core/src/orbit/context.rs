//! Rotation contexts: a deep convergent proxy `p_M / q_M` for the angle,
//! with a certified range of orbit lengths for which exact ordering against
//! the proxy agrees with ordering against the true angle.
//!
//! Ordering of the first `N` orbit points depends on the digit sequence only
//! through levels with `q <= N`; the context enforces two extra guard levels
//! (`max_valid_N <= q_{M-2}`) plus a large multiplicative safety margin on
//! `q_M` itself, so every ordering-sensitive computation below `max_valid_N`
//! is provably identical for the proxy and the true angle.

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::contfrac::stream::CoefficientStream;
use crate::contfrac::table::{ConvergentTable, DeltaTable};
use crate::error::{Error, Result};
use crate::util::serde_int;
use crate::{Int, Rat};

/// Default multiplicative safety factor between `N_budget` and `q_M`.
pub const DEFAULT_SAFETY: u64 = 1 << 20;

/// One exact orbit point `R^j(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitPoint {
    /// Time `j` with `0 <= j <= N-1`.
    pub index: u64,
    /// Position numerator over `denominator`, in `[0, denominator)`.
    #[serde(with = "serde_int")]
    pub numerator: Int,
    #[serde(with = "serde_int")]
    pub denominator: Int,
}

impl OrbitPoint {
    /// Position in `[0, 1)` as an exact rational.
    pub fn position(&self) -> Rat {
        Rat::new(self.numerator.clone(), self.denominator.clone())
    }

    /// Signed representative in `[-1/2, 1/2)`: the position itself when
    /// `< 1/2`, else position minus one.
    pub fn signed(&self) -> Rat {
        if &self.numerator * 2 < self.denominator {
            self.position()
        } else {
            self.position() - Rat::one()
        }
    }
}

/// An exact working grid for one starting point: positions are
/// `(x_num + j * step_num) mod grid_den` over `grid_den = lcm(q_M, x_den)`.
#[derive(Clone, Debug)]
pub struct OrbitGrid {
    pub x_num: Int,
    pub step_num: Int,
    pub grid_den: Int,
}

/// Exact rotation context built from a digit stream.
#[derive(Clone, Debug)]
pub struct RotationContext {
    stream: CoefficientStream,
    table: ConvergentTable,
    deltas: DeltaTable,
    guard_level: usize,
    alpha_num: Int,
    alpha_den: Int,
    max_valid_n: u64,
}

impl RotationContext {
    /// Builds a context certified for orbit lengths up to at least
    /// `n_budget`: the guard level `M` is minimal with
    /// `q_M >= safety * n_budget` and `q_{M-2} >= n_budget`.
    pub fn make_context(
        stream: &mut CoefficientStream,
        n_budget: u64,
        safety: u64,
    ) -> Result<Self> {
        if n_budget == 0 {
            return Err(Error::Domain("orbit budget must be >= 1".into()));
        }
        if safety == 0 {
            return Err(Error::Domain("safety factor must be >= 1".into()));
        }
        if !stream.is_irrational() {
            return Err(Error::Length(
                "terminating (rational) stream cannot certify orbit ordering; \
                 use RotationContext::rational for exact rational angles"
                    .into(),
            ));
        }
        let budget = Int::from(n_budget);
        let target = Int::from(safety) * &budget;
        let mut depth = 4usize;
        loop {
            let eff = match stream.len_limit() {
                Some(limit) if limit < depth => limit,
                _ => depth,
            };
            if eff < 2 {
                return Err(Error::Length(format!(
                    "stream '{}' too short to certify any orbit",
                    stream.label()
                )));
            }
            stream.ensure(eff)?;
            let probe = ConvergentTable::build(stream, eff)?;
            let found =
                (3..=eff + 1).find(|&m| probe.q(m) >= &target && probe.q(m - 2) >= &budget);
            if let Some(m) = found {
                // Rebuild at exactly M-1 digits (rows 0..=M) so the proxy is
                // consistent with every row the delta ladder touches.
                let table = ConvergentTable::build(stream, m - 1)?;
                let reference = Rat::new(table.p(m).clone(), table.q(m).clone());
                let deltas = DeltaTable::build(&table, &reference)?;
                let max_valid_n = table.q(m - 2).to_u64().unwrap_or(u64::MAX);
                return Ok(RotationContext {
                    stream: stream.clone(),
                    alpha_num: table.p(m).clone(),
                    alpha_den: table.q(m).clone(),
                    guard_level: m,
                    table,
                    deltas,
                    max_valid_n,
                });
            }
            if Some(eff) == stream.len_limit() {
                return Err(Error::Length(format!(
                    "stream '{}' ends after {eff} digits, before the guard \
                     thresholds (q_M >= {target}, q_M-2 >= {budget})",
                    stream.label()
                )));
            }
            depth = depth.saturating_mul(2);
            if depth > 1 << 24 {
                return Err(Error::Length("no guard level within 2^24 digits".into()));
            }
        }
    }

    /// Context for an exact rational angle `p/q` (for tests and explicitly
    /// rational CLI runs): the proxy *is* the angle, so ordering is exact for
    /// any `N`, though positions repeat with period `q`.
    pub fn rational(p: &Int, q: &Int) -> Result<Self> {
        let mut stream = CoefficientStream::from_rational(p, q)?;
        let depth = stream.len_limit().expect("rational streams are finite");
        let table = ConvergentTable::build(&mut stream, depth)?;
        let m = depth + 1;
        debug_assert_eq!(table.q(m), q);
        debug_assert_eq!(table.p(m), p);
        let reference = Rat::new(p.clone(), q.clone());
        let deltas = DeltaTable::build(&table, &reference)?;
        let max_valid_n = q.to_u64().unwrap_or(u64::MAX);
        Ok(RotationContext {
            stream,
            alpha_num: p.clone(),
            alpha_den: q.clone(),
            guard_level: m,
            table,
            deltas,
            max_valid_n,
        })
    }

    pub fn table(&self) -> &ConvergentTable {
        &self.table
    }

    pub fn deltas(&self) -> &DeltaTable {
        &self.deltas
    }

    /// Guard level `M`: the proxy is `p_M / q_M`.
    pub fn guard_level(&self) -> usize {
        self.guard_level
    }

    pub fn alpha_num(&self) -> &Int {
        &self.alpha_num
    }

    pub fn alpha_den(&self) -> &Int {
        &self.alpha_den
    }

    /// Proxy value as an exact rational.
    pub fn alpha_proxy(&self) -> Rat {
        Rat::new(self.alpha_num.clone(), self.alpha_den.clone())
    }

    /// Largest orbit length with certified ordering.
    pub fn max_valid_n(&self) -> u64 {
        self.max_valid_n
    }

    /// The digit stream this context was built from.
    pub fn stream(&self) -> &CoefficientStream {
        &self.stream
    }

    /// Stable identifier of the angle as certified by this context: a SHA-256
    /// digest (hex) over the stream label and the exact proxy fraction.  Two
    /// runs agree on orbit data whenever their fingerprints agree.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(self.stream.label().as_bytes());
        h.update(b"|");
        h.update(self.alpha_num.to_string().as_bytes());
        h.update(b"/");
        h.update(self.alpha_den.to_string().as_bytes());
        let digest = h.finalize();
        let mut out = String::with_capacity(64);
        for byte in digest {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }

    /// Validates and scales a starting point `x in [0, 1)` onto an exact
    /// working grid with denominator `lcm(q_M, x_den)`.
    pub fn orbit_grid(&self, x: &Rat) -> Result<OrbitGrid> {
        if x < &Rat::zero() || x >= &Rat::one() {
            return Err(Error::Domain(format!("x = {x} outside [0, 1)")));
        }
        let x_den = x.denom();
        let grid_den = self.alpha_den.lcm(x_den);
        let x_num = x.numer() * (&grid_den / x_den);
        let step_num = &self.alpha_num * (&grid_den / &self.alpha_den);
        Ok(OrbitGrid { x_num, step_num, grid_den })
    }

    /// Exact position of `R^j(x)`; `j` must be within the certified range.
    pub fn position(&self, x: &Rat, j: u64) -> Result<OrbitPoint> {
        if j > self.max_valid_n {
            return Err(Error::Range(format!(
                "time {j} beyond certified range {}",
                self.max_valid_n
            )));
        }
        let grid = self.orbit_grid(x)?;
        let num = (&grid.x_num + Int::from(j) * &grid.step_num).mod_floor(&grid.grid_den);
        Ok(OrbitPoint { index: j, numerator: num, denominator: grid.grid_den })
    }

    /// Context for the reflected angle `1 - alpha`, built by transforming the
    /// digit stream (levels shift by one). This realizes sign-case reductions
    /// without duplicating any selection logic.
    pub fn mirrored(&self, n_budget: u64, safety: u64) -> Result<Self> {
        let mut stream = self.stream.mirrored()?;
        RotationContext::make_context(&mut stream, n_budget, safety)
    }
}
