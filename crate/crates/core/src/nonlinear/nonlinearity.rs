use num_complex::Complex64;

use crate::spectral::Field;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonlinearityKind {
    /// `λ |u|^{k−1} u`, scalar fibers only.
    ScalarPower,
    /// `λ ‖u(x)‖_H^{k−1} u(x)`.
    FiberNormPower,
}

/// Power nonlinearity `F(u)` with coupling `λ` and exponent `k > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nonlinearity {
    kind: NonlinearityKind,
    lambda: f64,
    k: f64,
}

impl Nonlinearity {
    pub fn new(kind: NonlinearityKind, lambda: f64, k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 1.0) {
            return Err(Error::InvalidNonlinearity(format!("power k = {k} must exceed 1")));
        }
        if !lambda.is_finite() {
            return Err(Error::InvalidNonlinearity(format!("coupling {lambda} must be finite")));
        }
        Ok(Self { kind, lambda, k })
    }

    pub fn scalar_power(lambda: f64, k: f64) -> Result<Self> {
        Self::new(NonlinearityKind::ScalarPower, lambda, k)
    }

    pub fn fiber_norm_power(lambda: f64, k: f64) -> Result<Self> {
        Self::new(NonlinearityKind::FiberNormPower, lambda, k)
    }

    pub fn kind(&self) -> NonlinearityKind {
        self.kind
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn is_linear(&self) -> bool {
        self.lambda == 0.0
    }

    /// Same power, new coupling.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.kind, lambda, self.k)
    }

    /// `F` applied to one fiber.
    pub fn apply_fiber(&self, u: &[Complex64]) -> Vec<Complex64> {
        let norm = u.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let w = if norm == 0.0 { 0.0 } else { self.lambda * norm.powf(self.k - 1.0) };
        u.iter().map(|v| v * w).collect()
    }

    pub fn eval(&self, u: &Field) -> Result<Field> {
        if self.kind == NonlinearityKind::ScalarPower && u.hdim() != 1 {
            return Err(Error::InvalidNonlinearity(format!(
                "scalar power needs one component, field has {}",
                u.hdim()
            )));
        }
        let d = u.hdim();
        let values: Vec<Complex64> = u.values().chunks(d).flat_map(|f| self.apply_fiber(f)).collect();
        Field::new(u.grid().clone(), d, values)
    }
}

/// Free-function form of [`Nonlinearity::eval`].
pub fn eval_nonlinearity(nl: &Nonlinearity, u: &Field) -> Result<Field> {
    nl.eval(u)
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::spectral::GridSpec;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn examples() {
        let grid = GridSpec::cube(1, 4, 1.0).unwrap();
        let nl = Nonlinearity::scalar_power(1.0, 3.0).unwrap();
        let z = Field::zeros(&grid, 1);
        assert_eq!(nl.eval(&z).unwrap(), z);
        let two = Field::new(grid.clone(), 1, vec![c(2.0); 4]).unwrap();
        assert!(nl.eval(&two).unwrap().values().iter().all(|v| *v == c(8.0)));
        assert!(nl.eval(&Field::zeros(&grid, 2)).is_err());
        assert!(Nonlinearity::scalar_power(1.0, 1.0).is_err());
        assert!(Nonlinearity::fiber_norm_power(f64::NAN, 3.0).is_err());
    }

    #[test]
    fn homogeneity() {
        let nl = Nonlinearity::scalar_power(-0.7, 2.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let u = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let cc = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let lhs = nl.apply_fiber(&[cc * u])[0];
            let rhs = cc * cc.norm().powf(1.5) * nl.apply_fiber(&[u])[0];
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn lipschitz_scan() {
        // |F(u) − F(v)| ≤ C |u − v| (|u| + |v|)^{k−1} with C = |λ| k
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for k in [2.0, 3.0, 4.5] {
            let nl = Nonlinearity::fiber_norm_power(1.3, k).unwrap();
            for _ in 0..1000 {
                let u: Vec<Complex64> =
                    (0..3).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
                let v: Vec<Complex64> =
                    (0..3).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
                let norm = |x: &[Complex64]| x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                let diff: Vec<Complex64> =
                    nl.apply_fiber(&u).iter().zip(nl.apply_fiber(&v)).map(|(a, b)| a - b).collect();
                let uv: Vec<Complex64> = u.iter().zip(&v).map(|(a, b)| a - b).collect();
                let bound = 1.3 * k * norm(&uv) * (norm(&u) + norm(&v)).powf(k - 1.0);
                assert!(norm(&diff) <= bound * (1.0 + 1e-12));
            }
        }
    }
}
