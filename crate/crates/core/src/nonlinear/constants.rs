use crate::strichartz::{classify_pair, Exponent, Rational};
use crate::{Error, Result};

/// Exponents of the local existence theorem for dimension `n ≥ 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TheoremConstants {
    pub n: u32,
    /// `γ = (n−3) / (2(n−1))`
    pub gamma: Rational,
    /// `k₀ = (n+1)² / ((n−1)² + 4)`
    pub k0: Rational,
    /// `q₀ = 2(n+1) / (n−3)`
    pub q0: Rational,
    /// `r₀ = 2(n²−1) / ((n²−1) + 4)`
    pub r0: Rational,
    /// `(q₀, r₀)` fails admissibility; `r₀ < 2` for every `n ≥ 4`.
    pub r0_inadmissible: bool,
}

pub fn theorem_constants(n: u32) -> Result<TheoremConstants> {
    if n < 4 {
        return Err(Error::InvalidExponent(format!("constants need n >= 4, got {n}")));
    }
    let m = n as i64;
    let gamma = Rational::new(m - 3, 2 * (m - 1));
    let k0 = Rational::new((m + 1) * (m + 1), (m - 1) * (m - 1) + 4);
    let q0 = Rational::new(2 * (m + 1), m - 3);
    let r0 = Rational::new(2 * (m * m - 1), (m * m - 1) + 4);
    let verdict = classify_pair(n, Exponent::Finite(q0), Exponent::Finite(r0))?;
    Ok(TheoremConstants { n, gamma, k0, q0, r0, r0_inadmissible: !verdict.admissible })
}
