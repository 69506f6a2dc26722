use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::{Error, Result};

pub type Rational = Ratio<i64>;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// An exponent in `[1, ∞]`, kept exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(Rational),
    Infinite,
}

impl Exponent {
    pub fn int(v: i64) -> Self {
        Self::Finite(Rational::from_integer(v))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::Finite(rat(n, d))
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn reciprocal(self) -> Rational {
        match self {
            Self::Finite(p) => p.recip(),
            Self::Infinite => rat(0, 1),
        }
    }

    /// The exponent with reciprocal `x`; `x = 0` gives `∞`.
    pub fn from_reciprocal(x: Rational) -> Self {
        if x == rat(0, 1) {
            Self::Infinite
        } else {
            Self::Finite(x.recip())
        }
    }

    /// Hölder conjugate `p′`.
    pub fn conjugate(self) -> Self {
        Self::from_reciprocal(rat(1, 1) - self.reciprocal())
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Self::Finite(p) => *p.numer() as f64 / *p.denom() as f64,
            Self::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Self::Infinite)
    }

    /// `p ≥ x` for a finite `x`.
    fn at_least(self, x: Rational) -> bool {
        match self {
            Self::Finite(p) => p >= x,
            Self::Infinite => true,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(p) if *p.denom() == 1 => write!(f, "{}", p.numer()),
            Self::Finite(p) => write!(f, "{}/{}", p.numer(), p.denom()),
            Self::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// `"4"`, `"5/2"`, `"inf"` or `"∞"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "inf" | "infinity" | "∞") {
            return Ok(Self::Infinite);
        }
        parse_rational(s).map(Self::Finite)
    }
}

/// `"a"` or `"a/b"` as an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidExponent(format!("cannot read {s:?} as a rational"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<i64>().map_err(|_| bad())?, d.trim().parse::<i64>().map_err(|_| bad())?),
        None => (s.parse::<i64>().map_err(|_| bad())?, 1),
    };
    if d == 0 {
        return Err(bad());
    }
    Ok(rat(n, d))
}

/// Outcome of [`classify_pair`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdmissibilityVerdict {
    pub admissible: bool,
    pub sharp: bool,
    pub endpoint: bool,
    /// `(n, q, r) = (2, 2, ∞)`
    pub excluded_triple: bool,
    /// `1/q + (n−1)/(2r)`
    pub lhs: Rational,
    /// `(n−1)/4`
    pub rhs: Rational,
}

/// Wave admissibility: `1/q + (n−1)/(2r) ≤ (n−1)/4`, `2 ≤ q, r ≤ ∞`,
/// `(n, q, r) ≠ (2, 2, ∞)`. Sharp on equality; endpoint at
/// `(2, 2(n−1)/(n−3))` for `n > 3`.
pub fn classify_pair(n: u32, q: Exponent, r: Exponent) -> Result<AdmissibilityVerdict> {
    if n <= 1 {
        return Err(Error::InvalidExponent(format!("dimension n = {n} must exceed 1")));
    }
    let n = n as i64;
    let lhs = q.reciprocal() + rat(n - 1, 2) * r.reciprocal();
    let rhs = rat(n - 1, 4);
    let in_range = q.at_least(rat(2, 1)) && r.at_least(rat(2, 1));
    let excluded_triple = n == 2 && q == Exponent::int(2) && r.is_infinite();
    let admissible = in_range && lhs <= rhs && !excluded_triple;
    let sharp = admissible && lhs == rhs;
    let endpoint = sharp && n > 3 && q == Exponent::int(2) && r == Exponent::ratio(2 * (n - 1), n - 3);
    Ok(AdmissibilityVerdict { admissible, sharp, endpoint, excluded_triple, lhs, rhs })
}

/// `(2, 2(n−1)/(n−3))`, defined for `n > 3`.
pub fn endpoint_pair(n: u32) -> Result<(Exponent, Exponent)> {
    if n <= 3 {
        return Err(Error::InvalidExponent(format!("endpoint pair needs n > 3, got {n}")));
    }
    let n = n as i64;
    Ok((Exponent::int(2), Exponent::ratio(2 * (n - 1), n - 3)))
}

/// The exponent grid `{2, 5/2, 3, 4, 6, 8, ∞}`.
pub fn standard_exponents() -> Vec<Exponent> {
    vec![
        Exponent::int(2),
        Exponent::ratio(5, 2),
        Exponent::int(3),
        Exponent::int(4),
        Exponent::int(6),
        Exponent::int(8),
        Exponent::Infinite,
    ]
}

/// First sharp admissible pair with finite `r` on [`standard_exponents`],
/// scanning `q` then `r` in increasing order.
pub fn default_pair(n: u32) -> Result<(Exponent, Exponent)> {
    let grid = standard_exponents();
    for &q in &grid {
        for &r in &grid {
            if !r.is_infinite() && classify_pair(n, q, r)?.sharp {
                return Ok((q, r));
            }
        }
    }
    Err(Error::InvalidExponent(format!("no sharp admissible pair with finite r for n = {n}")))
}

/// Residuals of the scaling relation
/// `1/q + n/r = n/2 − γ = 1/q̃ + n/r̃ − 2`, checked verbatim and with the
/// source pair read as Hölder duals, `n/2 − γ = 1/q̃′ + n/r̃′ − 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapVerdict {
    /// `1/q + n/r − (n/2 − γ)`
    pub first: Rational,
    /// `(n/2 − γ) − (1/q̃ + n/r̃ − 2)`
    pub second: Rational,
    /// `(n/2 − γ) − (1/q̃′ + n/r̃′ − 2)`
    pub second_dual: Rational,
}

impl GapVerdict {
    /// Both equalities as printed.
    pub fn holds(&self) -> bool {
        self.first == rat(0, 1) && self.second == rat(0, 1)
    }

    /// First equality plus the dual reading of the second.
    pub fn holds_dual(&self) -> bool {
        self.first == rat(0, 1) && self.second_dual == rat(0, 1)
    }
}

pub fn gap_check(n: u32, gamma: Rational, q: Exponent, r: Exponent, qt: Exponent, rt: Exponent) -> GapVerdict {
    let nn = Rational::from_integer(n as i64);
    let mid = nn / 2 - gamma;
    let first = q.reciprocal() + nn * r.reciprocal() - mid;
    let second = mid - (qt.reciprocal() + nn * rt.reciprocal() - 2);
    let second_dual = mid - (qt.conjugate().reciprocal() + nn * rt.conjugate().reciprocal() - 2);
    GapVerdict { first, second, second_dual }
}

/// `γ = n/2 − 1/q − n/r`, the regularity matching a pair.
pub fn gamma_for(n: u32, q: Exponent, r: Exponent) -> Rational {
    let nn = Rational::from_integer(n as i64);
    nn / 2 - q.reciprocal() - nn * r.reciprocal()
}

/// `β(r, r̃) = n/2 − 1 − (n/2)(1/r − 1/r̃)`.
pub fn beta_exponent(n: u32, r: Exponent, rt: Exponent) -> Rational {
    let half = rat(n as i64, 2);
    half - 1 - half * (r.reciprocal() - rt.reciprocal())
}

/// True when the formula gives `β(r, r) > 0` for `n > 2`, against the
/// accompanying claim that `β(r, r) ≤ 0` there.
pub fn beta_claim_contradicted(n: u32) -> bool {
    n > 2 && beta_exponent(n, Exponent::int(2), Exponent::int(2)) > rat(0, 1)
}

/// Exponents of one Strichartz estimate: solution pair `(q, r)`, source
/// pair `(q̃, r̃)`, regularity `γ`, fractional power `α ∈ [0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapRelation {
    pub n: u32,
    pub gamma: Rational,
    pub pair: (Exponent, Exponent),
    pub dual: (Exponent, Exponent),
    pub alpha: Rational,
}

impl GapRelation {
    /// Requires both pairs admissible and the relation in its dual reading.
    pub fn new(
        n: u32,
        gamma: Rational,
        pair: (Exponent, Exponent),
        dual: (Exponent, Exponent),
        alpha: Rational,
    ) -> Result<Self> {
        if alpha < rat(0, 1) || alpha >= rat(1, 1) {
            return Err(Error::InvalidExponent(format!("alpha = {alpha} must lie in [0, 1)")));
        }
        for (q, r) in [pair, dual] {
            if !classify_pair(n, q, r)?.admissible {
                return Err(Error::InvalidExponent(format!("pair ({q}, {r}) is not admissible for n = {n}")));
            }
        }
        let v = gap_check(n, gamma, pair.0, pair.1, dual.0, dual.1);
        if !v.holds_dual() {
            return Err(Error::InvalidExponent(format!(
                "gap relation fails: residuals {} and {} (dual)",
                v.first, v.second_dual
            )));
        }
        Ok(Self { n, gamma, pair, dual, alpha })
    }

    /// `(q, r) = (q̃, r̃)` with `γ` fixed by the pair.
    pub fn symmetric(n: u32, pair: (Exponent, Exponent), alpha: Rational) -> Result<Self> {
        Self::new(n, gamma_for(n, pair.0, pair.1), pair, pair, alpha)
    }

    pub fn verdict(&self) -> GapVerdict {
        gap_check(self.n, self.gamma, self.pair.0, self.pair.1, self.dual.0, self.dual.1)
    }
}
