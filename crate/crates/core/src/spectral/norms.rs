use num_complex::Complex64;

use super::{forward_transform, Field, SpectralField};
use crate::{Error, Result};

/// Order of an `L²`-based Sobolev norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevSpec {
    pub order: f64,
    pub homogeneous: bool,
}

impl SobolevSpec {
    /// `W^{s,2}` with weight `⟨ξ⟩^s = (1 + |ξ|²)^{s/2}`.
    pub fn inhomogeneous(order: f64) -> Self {
        Self { order, homogeneous: false }
    }

    /// `Ẇ^{s,2}` with weight `|ξ|^s`.
    pub fn homogeneous(order: f64) -> Self {
        Self { order, homogeneous: true }
    }
}

/// Zero modes below this fraction of the spectrum's largest coefficient
/// count as vanishing for negative-order homogeneous norms.
const ZERO_MODE_TOL: f64 = 1e-12;

/// Sobolev norm of a physical field, via Plancherel.
pub fn sobolev_norm(f: &Field, spec: SobolevSpec) -> Result<f64> {
    spectral_sobolev_norm(&forward_transform(f)?, spec)
}

/// Sobolev norm of the field a spectrum represents.
pub fn spectral_sobolev_norm(g: &SpectralField, spec: SobolevSpec) -> Result<f64> {
    if !spec.order.is_finite() {
        return Err(Error::InvalidExponent(format!("Sobolev order {} is not finite", spec.order)));
    }
    let s = spec.order;
    let xi2 = g.grid().xi_squared();
    let scale = g.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut sum = 0.0;
    for (mode, &x2) in xi2.iter().enumerate() {
        let fiber: f64 = g.fiber(mode).iter().map(|v| v.norm_sqr()).sum();
        let weight = if spec.homogeneous {
            if x2 == 0.0 {
                if s > 0.0 {
                    0.0
                } else if s == 0.0 {
                    1.0
                } else if fiber.sqrt() <= ZERO_MODE_TOL * scale {
                    0.0
                } else {
                    return Err(Error::SingularMultiplier { order: s });
                }
            } else {
                x2.powf(s)
            }
        } else {
            (1.0 + x2).powf(s)
        };
        sum += weight * fiber;
    }
    Ok((sum * g.grid().cell_volume()).sqrt())
}

/// `L^r(box; H)` norm with the fiber `ℓ²` norm pointwise; `r = ∞` takes the max.
pub fn lebesgue_norm(f: &Field, r: f64) -> Result<f64> {
    check_exponent("r", r)?;
    let norms = f.fiber_norms();
    if r.is_infinite() {
        return Ok(norms.into_iter().fold(0.0, f64::max));
    }
    let dv = f.grid().cell_volume();
    // rescale by the max so large r cannot overflow
    let peak = norms.iter().copied().fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = norms.iter().map(|n| (n / peak).powf(r)).sum();
    Ok(peak * (sum * dv).powf(1.0 / r))
}

/// `L^q_t L^r_x` norm of samples on a uniform time grid with step `dt`.
///
/// The inner norm is [`lebesgue_norm`]; the outer integral uses the
/// composite trapezoid rule, or the max when `q = ∞`.
pub fn mixed_norm(samples: &[Field], dt: f64, q: f64, r: f64) -> Result<f64> {
    check_exponent("q", q)?;
    check_exponent("r", r)?;
    if samples.len() < 2 {
        return Err(Error::InvalidTimeGrid("mixed norm needs at least 2 time samples".into()));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidTimeGrid(format!("time step {dt} must be positive")));
    }
    let inner = samples.iter().map(|f| lebesgue_norm(f, r)).collect::<Result<Vec<_>>>()?;
    Ok(time_norm(&inner, dt, q))
}

/// Outer `L^q` norm in time of per-sample values.
pub(crate) fn time_norm(inner: &[f64], dt: f64, q: f64) -> f64 {
    if q.is_infinite() {
        return inner.iter().copied().fold(0.0, f64::max);
    }
    let peak = inner.iter().copied().fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let last = inner.len() - 1;
    let sum: f64 = inner
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let w = if j == 0 || j == last { 0.5 } else { 1.0 };
            w * (v / peak).powf(q)
        })
        .sum();
    peak * (sum * dt).powf(1.0 / q)
}

fn check_exponent(name: &str, p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        Err(Error::InvalidExponent(format!("{name} = {p} must be >= 1")))
    } else {
        Ok(())
    }
}

/// Weighted sequence norm `(Σ_j |2^{sj} v_j|²)^{1/2}`, `j` counted from 1.
pub fn l2s_norm(v: &[Complex64], s: f64) -> Result<f64> {
    if let Some(j) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { location: format!("sequence entry {}", j + 1) });
    }
    Ok(v.iter().enumerate().map(|(j, x)| 2f64.powf(2.0 * s * (j + 1) as f64) * x.norm_sqr()).sum::<f64>().sqrt())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::spectral::{apply_scalar_multiplier, inverse_transform, GridSpec};

    fn random_field(grid: &GridSpec, hdim: usize, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..grid.len() * hdim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Field::new(grid.clone(), hdim, values).unwrap()
    }

    fn physical_l2(f: &Field) -> f64 {
        (f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * f.grid().cell_volume()).sqrt()
    }

    #[test]
    fn single_mode_homogeneous_order_one() {
        let grid = GridSpec::new(vec![16], vec![2.0 * PI]).unwrap();
        let amp = 1.0 / (2.0 * PI).sqrt();
        let f = Field::from_fn(&grid, 1, |x| vec![Complex64::from_polar(amp, 2.0 * x[0])]).unwrap();
        assert!((physical_l2(&f) - 1.0).abs() < 1e-13);
        let n = sobolev_norm(&f, SobolevSpec::homogeneous(1.0)).unwrap();
        assert!((n - 2.0).abs() < 1e-12);
    }

    #[test]
    fn order_zero_is_l2() {
        let grid = GridSpec::new(vec![8, 8], vec![1.0, 2.0]).unwrap();
        let f = random_field(&grid, 2, 1);
        let l2 = physical_l2(&f);
        for spec in [SobolevSpec::homogeneous(0.0), SobolevSpec::inhomogeneous(0.0)] {
            assert!((sobolev_norm(&f, spec).unwrap() - l2).abs() < 1e-12 * l2);
        }
    }

    #[test]
    fn homogeneous_order_one_matches_gradient_sum() {
        let grid = GridSpec::new(vec![16, 8], vec![2.0, 3.0]).unwrap();
        let f = random_field(&grid, 2, 2);
        let g = forward_transform(&f).unwrap();
        let mut grad_sq = 0.0;
        for axis in 0..grid.dim() {
            let d = apply_scalar_multiplier(&g, |xi| Complex64::new(0.0, xi[axis])).unwrap();
            grad_sq += physical_l2(&inverse_transform(&d)).powi(2);
        }
        let n = sobolev_norm(&f, SobolevSpec::homogeneous(1.0)).unwrap();
        assert!((n - grad_sq.sqrt()).abs() <= 1e-10 * n);
    }

    #[test]
    fn negative_homogeneous_needs_zero_mean() {
        let grid = GridSpec::new(vec![8], vec![1.0]).unwrap();
        let f = random_field(&grid, 1, 3);
        assert!(matches!(sobolev_norm(&f, SobolevSpec::homogeneous(-0.5)), Err(Error::SingularMultiplier { .. })));
        let mut g = forward_transform(&f).unwrap();
        g.fiber_mut(0)[0] = Complex64::new(0.0, 0.0);
        assert!(spectral_sobolev_norm(&g, SobolevSpec::homogeneous(-0.5)).unwrap() > 0.0);
    }

    #[test]
    fn inhomogeneous_norms_increase_with_order() {
        let grid = GridSpec::new(vec![8, 8], vec![1.0, 1.0]).unwrap();
        let f = random_field(&grid, 1, 4);
        let mut prev = 0.0;
        for s in [-1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
            let n = sobolev_norm(&f, SobolevSpec::inhomogeneous(s)).unwrap();
            assert!(n >= prev);
            prev = n;
        }
    }

    #[test]
    fn constant_function_mixed_norm() {
        let grid = GridSpec::new(vec![8, 4], vec![2.0, 1.5]).unwrap();
        let one = Field::from_fn(&grid, 1, |_| vec![Complex64::new(1.0, 0.0)]).unwrap();
        let samples = vec![one; 11];
        let v = grid.volume();
        for r in [1.0, 2.0, 3.5] {
            let n = mixed_norm(&samples, 0.1, 2.0, r).unwrap();
            assert!((n - v.powf(1.0 / r)).abs() < 1e-12);
        }
        assert!((mixed_norm(&samples, 0.1, f64::INFINITY, f64::INFINITY).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn l2_l2_matches_trapezoid_of_flat_sums() {
        let grid = GridSpec::new(vec![8], vec![1.0]).unwrap();
        let samples: Vec<Field> = (0..5).map(|s| random_field(&grid, 2, 10 + s)).collect();
        let dt = 0.25;
        let flat: f64 = samples
            .iter()
            .enumerate()
            .map(|(j, f)| {
                let w = if j == 0 || j == 4 { 0.5 } else { 1.0 };
                w * f.values().iter().map(|v| v.norm_sqr()).sum::<f64>()
            })
            .sum();
        let expect = (flat * dt * grid.cell_volume()).sqrt();
        assert!((mixed_norm(&samples, dt, 2.0, 2.0).unwrap() - expect).abs() < 1e-13 * expect);
    }

    #[test]
    fn sup_in_time_takes_max_snapshot() {
        let grid = GridSpec::new(vec![8], vec![1.0]).unwrap();
        let base = random_field(&grid, 1, 5);
        let samples: Vec<Field> = (0..6).map(|j| base.scaled(Complex64::new((-0.3 * j as f64).exp(), 0.0))).collect();
        let n = mixed_norm(&samples, 0.1, f64::INFINITY, 2.0).unwrap();
        let max = samples.iter().map(physical_l2).fold(0.0, f64::max);
        assert!((n - max).abs() < 1e-14);
        assert!((n - physical_l2(&base)).abs() < 1e-14);
    }

    #[test]
    fn rejects_small_exponents() {
        let grid = GridSpec::new(vec![4], vec![1.0]).unwrap();
        let s = vec![Field::zeros(&grid, 1); 2];
        assert!(mixed_norm(&s, 0.1, 0.5, 2.0).is_err());
        assert!(mixed_norm(&s, 0.1, 2.0, 0.9).is_err());
        assert!(mixed_norm(&s[..1], 0.1, 2.0, 2.0).is_err());
    }

    #[test]
    fn weighted_sequence_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let v: Vec<Complex64> = (0..12).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
        let plain = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        assert!((l2s_norm(&v, 0.0).unwrap() - plain).abs() < 1e-15);
        let e1 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert_eq!(l2s_norm(&e1, 1.0).unwrap(), 2.0);
        let mut direct = 0.0;
        for (j, x) in v.iter().enumerate() {
            let w = 2f64.powf(0.5 * (j + 1) as f64);
            direct += (w * x.norm()).powi(2);
        }
        assert!((l2s_norm(&v, 0.5).unwrap() - direct.sqrt()).abs() < 1e-14 * direct.sqrt());
    }
}
