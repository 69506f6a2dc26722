use num_complex::Complex64;

use crate::{Error, Result};

/// Multipoint conditions
/// `u(0) = φ + Σ α_k u(λ_k)`, `u_t(0) = ψ + Σ β_k u_t(λ_k)`.
///
/// All-zero coefficients describe the classical Cauchy problem and are
/// accepted. Otherwise every `|α_k + β_k|` and `(Σ α_k)(Σ β_j)` must be
/// nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipointSpec {
    alphas: Vec<Complex64>,
    betas: Vec<Complex64>,
    lambdas: Vec<f64>,
}

const ZERO_TOL: f64 = 1e-14;

impl MultipointSpec {
    pub fn new(alphas: Vec<Complex64>, betas: Vec<Complex64>, lambdas: Vec<f64>) -> Result<Self> {
        if alphas.len() != lambdas.len() || betas.len() != lambdas.len() {
            return Err(Error::InvalidMultipoint(format!(
                "{} alphas, {} betas and {} times must agree",
                alphas.len(),
                betas.len(),
                lambdas.len()
            )));
        }
        if let Some(k) = lambdas.iter().position(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::InvalidMultipoint(format!(
                "time lambda_{} = {} must be strictly positive",
                k + 1,
                lambdas[k]
            )));
        }
        if alphas.iter().chain(&betas).any(|c| !c.is_finite()) {
            return Err(Error::InvalidMultipoint("coefficients must be finite".into()));
        }
        let spec = Self { alphas, betas, lambdas };
        if !spec.is_cauchy() {
            for (k, (a, b)) in spec.alphas.iter().zip(&spec.betas).enumerate() {
                if (a + b).norm() <= ZERO_TOL * (a.norm() + b.norm()).max(f64::MIN_POSITIVE) {
                    return Err(Error::InvalidMultipoint(format!(
                        "|alpha_k + beta_k| > 0 fails at k = {} (alpha = {a}, beta = {b})",
                        k + 1
                    )));
                }
            }
            let sa: Complex64 = spec.alphas.iter().sum();
            let sb: Complex64 = spec.betas.iter().sum();
            let scale =
                spec.alphas.iter().map(|a| a.norm()).sum::<f64>() * spec.betas.iter().map(|b| b.norm()).sum::<f64>();
            if (sa * sb).norm() <= ZERO_TOL * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::InvalidMultipoint(format!(
                    "(sum alpha)(sum beta) must be nonzero, got ({sa})({sb})"
                )));
            }
        }
        Ok(spec)
    }

    /// Real-coefficient convenience constructor.
    pub fn real(alphas: &[f64], betas: &[f64], lambdas: &[f64]) -> Result<Self> {
        Self::new(
            alphas.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
            betas.iter().map(|&b| Complex64::new(b, 0.0)).collect(),
            lambdas.to_vec(),
        )
    }

    /// No interior coupling: `u(0) = φ`, `u_t(0) = ψ`.
    pub fn cauchy() -> Self {
        Self { alphas: Vec::new(), betas: Vec::new(), lambdas: Vec::new() }
    }

    pub fn count(&self) -> usize {
        self.lambdas.len()
    }

    pub fn alphas(&self) -> &[Complex64] {
        &self.alphas
    }

    pub fn betas(&self) -> &[Complex64] {
        &self.betas
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn max_lambda(&self) -> f64 {
        self.lambdas.iter().copied().fold(0.0, f64::max)
    }

    /// True when every coefficient vanishes.
    pub fn is_cauchy(&self) -> bool {
        self.alphas.iter().chain(&self.betas).all(|c| *c == Complex64::new(0.0, 0.0))
    }

    /// Checks `λ_k ≤ horizon`.
    pub fn check_horizon(&self, horizon: f64) -> Result<()> {
        match self.lambdas.iter().position(|&l| l > horizon * (1.0 + 1e-12)) {
            Some(k) => Err(Error::InvalidMultipoint(format!(
                "lambda_{} = {} exceeds the horizon {horizon}",
                k + 1,
                self.lambdas[k]
            ))),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_cauchy_and_generic() {
        assert!(MultipointSpec::real(&[0.0], &[0.0], &[0.5]).unwrap().is_cauchy());
        assert!(MultipointSpec::cauchy().is_cauchy());
        let s = MultipointSpec::real(&[0.25, 0.1], &[0.25, -0.05], &[0.5, 1.0]).unwrap();
        assert_eq!(s.count(), 2);
        assert_eq!(s.max_lambda(), 1.0);
        assert!(s.check_horizon(1.0).is_ok());
        assert!(s.check_horizon(0.9).is_err());
    }

    #[test]
    fn rejects_cancelling_pair() {
        let err = MultipointSpec::real(&[1.0], &[-1.0], &[0.5]).unwrap_err();
        assert!(err.to_string().contains("alpha_k + beta_k"), "{err}");
    }

    #[test]
    fn rejects_vanishing_product() {
        let err = MultipointSpec::real(&[1.0, -1.0], &[0.5, 0.5], &[0.5, 1.0]).unwrap_err();
        assert!(err.to_string().contains("sum alpha"), "{err}");
    }

    #[test]
    fn rejects_bad_times_and_lengths() {
        assert!(MultipointSpec::real(&[0.1], &[0.1], &[0.0]).is_err());
        assert!(MultipointSpec::real(&[0.1], &[0.1], &[-1.0]).is_err());
        assert!(MultipointSpec::real(&[0.1, 0.2], &[0.1], &[1.0]).is_err());
    }
}
