//! Bounded-type rotation numbers given by eventually periodic continued
//! fractions `θ = [0; a_1, a_2, ...]`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RotationError {
    #[error("periodic tail of the continued fraction is empty")]
    EmptyPeriod,
    #[error("partial quotient {0} at position {1} is not a positive integer")]
    NonPositiveQuotient(i64, usize),
    #[error("malformed continued fraction literal `{0}`")]
    Malformed(String),
}

/// A rotation number in `(0, 1)` with continued fraction expansion
/// `[0; preperiod..., period, period, ...]`.
///
/// The value is cached both as a binary64 and as an unevaluated
/// double-double `hi + lo`, the latter used for `frac(nθ)` so that the
/// boundary sort keys carry no systematic drift.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationNumber {
    preperiod: Vec<u32>,
    period: Vec<u32>,
    value: f64,
    value_dd: DoubleDouble,
}

impl RotationNumber {
    pub fn from_quotients(preperiod: &[i64], period: &[i64]) -> Result<Self, RotationError> {
        if period.is_empty() {
            return Err(RotationError::EmptyPeriod);
        }
        let check = |q: i64, pos: usize| -> Result<u32, RotationError> {
            if q <= 0 || q > u32::MAX as i64 {
                Err(RotationError::NonPositiveQuotient(q, pos))
            } else {
                Ok(q as u32)
            }
        };
        let pre = preperiod
            .iter()
            .enumerate()
            .map(|(i, &q)| check(q, i + 1))
            .collect::<Result<Vec<_>, _>>()?;
        let per = period
            .iter()
            .enumerate()
            .map(|(i, &q)| check(q, pre.len() + i + 1))
            .collect::<Result<Vec<_>, _>>()?;
        let value_dd = periodic_value_dd(&pre, &per);
        let value = periodic_value_f64(&pre, &per);
        Ok(Self { preperiod: pre, period: per, value, value_dd })
    }

    /// The golden mean `(√5 − 1)/2 = [0; 1, 1, 1, ...]`.
    pub fn golden() -> Self {
        Self::from_quotients(&[], &[1]).expect("valid quotients")
    }

    /// Parses `pre:period` where both sides are comma-separated lists,
    /// e.g. `20:1`, `:1`, `1,2:3,4`.
    pub fn parse_cf(s: &str) -> Result<Self, RotationError> {
        let malformed = || RotationError::Malformed(s.to_string());
        let (pre, per) = s.split_once(':').ok_or_else(malformed)?;
        let list = |part: &str| -> Result<Vec<i64>, RotationError> {
            if part.trim().is_empty() {
                return Ok(Vec::new());
            }
            part.split(',')
                .map(|t| t.trim().parse::<i64>().map_err(|_| malformed()))
                .collect()
        };
        Self::from_quotients(&list(pre)?, &list(per)?)
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// High and low parts of the double-double value.
    pub fn value_dd(&self) -> (f64, f64) {
        (self.value_dd.hi, self.value_dd.lo)
    }

    pub fn preperiod(&self) -> &[u32] {
        &self.preperiod
    }

    pub fn period(&self) -> &[u32] {
        &self.period
    }

    pub fn max_quotient(&self) -> u32 {
        self.preperiod.iter().chain(&self.period).copied().max().unwrap_or(1)
    }

    /// Partial quotients `a_1, a_2, ...` (infinite iterator).
    pub fn quotients(&self) -> impl Iterator<Item = u32> + '_ {
        self.preperiod.iter().copied().chain(self.period.iter().copied().cycle())
    }

    /// Fractional part of `nθ`, computed in double-double.
    pub fn frac_multiple(&self, n: u64) -> f64 {
        let x = self.value_dd.mul_u64(n);
        let fl = x.hi.floor();
        let r = DoubleDouble::two_sum(x.hi - fl, x.lo);
        let mut f = r.hi + r.lo;
        if f >= 1.0 {
            f -= 1.0;
        } else if f < 0.0 {
            f += 1.0;
        }
        f
    }

    /// The first `n` convergents `p_k/q_k`, `k = 1..=n`.
    pub fn convergents(&self, n: usize) -> Vec<(u64, u64)> {
        let (mut p_prev, mut q_prev) = (1u64, 0u64);
        let (mut p, mut q) = (0u64, 1u64);
        self.quotients()
            .take(n)
            .map(|a| {
                let a = a as u64;
                let (np, nq) = (a * p + p_prev, a * q + q_prev);
                (p_prev, q_prev, p, q) = (p, q, np, nq);
                (p, q)
            })
            .collect()
    }

    /// Display form `pre:period` accepted by [`RotationNumber::parse_cf`].
    pub fn cf_string(&self) -> String {
        let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        format!("{}:{}", join(&self.preperiod), join(&self.period))
    }
}

impl fmt::Display for RotationNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.16} [{}]", self.value, self.cf_string())
    }
}

impl Serialize for RotationNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.value)
    }
}

/// Numerators and denominators `(p_{m-1}, q_{m-1}, p_m, q_m)` of the
/// last two convergents of `[0; quotients]`.
fn block_convergents(quotients: &[u32]) -> (f64, f64, f64, f64) {
    let (mut p_prev, mut q_prev, mut p, mut q) = (1.0, 0.0, 0.0, 1.0);
    for &a in quotients {
        let a = a as f64;
        (p_prev, q_prev, p, q) = (p, q, a * p + p_prev, a * q + q_prev);
    }
    (p_prev, q_prev, p, q)
}

// x = (p_m + p_{m-1} x) / (q_m + q_{m-1} x), positive root.
fn periodic_value_f64(pre: &[u32], per: &[u32]) -> f64 {
    let (pp, qp, p, q) = block_convergents(per);
    let b = q - pp;
    let tail = 2.0 * p / (b + (b * b + 4.0 * qp * p).sqrt());
    let (pp, qp, p, q) = block_convergents(pre);
    (p + pp * tail) / (q + qp * tail)
}

fn periodic_value_dd(pre: &[u32], per: &[u32]) -> DoubleDouble {
    let (pp, qp, p, q) = block_convergents(per);
    let b = DoubleDouble::from(q - pp);
    let disc = b.mul(b).add(DoubleDouble::from(4.0 * qp * p));
    let tail = DoubleDouble::from(2.0 * p).div(b.add(disc.sqrt()));
    let (pp, qp, p, q) = block_convergents(pre);
    let num = DoubleDouble::from(p).add(tail.mul(DoubleDouble::from(pp)));
    let den = DoubleDouble::from(q).add(tail.mul(DoubleDouble::from(qp)));
    num.div(den)
}

/// Minimal double-double arithmetic (Dekker/Knuth error-free transforms).
#[derive(Clone, Copy, Debug, PartialEq)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl From<f64> for DoubleDouble {
    fn from(hi: f64) -> Self {
        Self { hi, lo: 0.0 }
    }
}

impl DoubleDouble {
    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Self { hi: s, lo: err }
    }

    fn quick_two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        Self { hi: s, lo: b - (s - a) }
    }

    fn two_prod(a: f64, b: f64) -> Self {
        let p = a * b;
        Self { hi: p, lo: a.mul_add(b, -p) }
    }

    fn add(self, o: Self) -> Self {
        let s = Self::two_sum(self.hi, o.hi);
        let t = Self::two_sum(self.lo, o.lo);
        let r = Self::quick_two_sum(s.hi, s.lo + t.hi);
        Self::quick_two_sum(r.hi, r.lo + t.lo)
    }

    fn mul(self, o: Self) -> Self {
        let p = Self::two_prod(self.hi, o.hi);
        Self::quick_two_sum(p.hi, p.lo + (self.hi * o.lo + self.lo * o.hi))
    }

    fn mul_u64(self, n: u64) -> Self {
        // n < 2^53 in every use here, so it is exact as an f64.
        self.mul(Self::from(n as f64))
    }

    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul(Self::from(-q1)));
        let q2 = r.hi / o.hi;
        let r = r.add(o.mul(Self::from(-q2)));
        let q3 = r.hi / o.hi;
        Self::quick_two_sum(q1, q2).add(Self::from(q3))
    }

    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::from(0.0);
        }
        let x = self.hi.sqrt();
        let xx = Self::two_prod(x, x);
        let corr = self.add(Self { hi: -xx.hi, lo: -xx.lo }).hi / (2.0 * x);
        Self::quick_two_sum(x, corr)
    }
}
