use num_complex::Complex64;
use rayon::prelude::*;

use crate::operator::OperatorSpec;
use crate::spectral::{forward_transform, inverse_transform, lebesgue_norm, Field, SpectralField};
use crate::{Error, Result};

/// Which decay law fits a norm series better.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayModel {
    /// `c · t^{−e}`
    Power,
    /// `c · (1 + t)^{−e}`
    Shifted,
}

/// Log-log least-squares fits of a decaying series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub power_exponent: f64,
    pub power_rms: f64,
    pub shifted_exponent: f64,
    pub shifted_rms: f64,
    pub better: DecayModel,
}

impl DecayFit {
    pub fn exponent(&self) -> f64 {
        match self.better {
            DecayModel::Power => self.power_exponent,
            DecayModel::Shifted => self.shifted_exponent,
        }
    }
}

/// Slope and RMS residual of the least-squares line through `(x, y)`.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let rms = (x.iter().zip(y).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum::<f64>() / n).sqrt();
    (slope, rms)
}

/// Fits `values(t)` against `t^{−e}` and `(1+t)^{−e}`; needs at least two
/// positive times and positive values.
pub fn fit_decay(times: &[f64], values: &[f64]) -> Result<DecayFit> {
    if times.len() != values.len() || times.len() < 2 {
        return Err(Error::ShapeMismatch("decay fit needs at least two (t, value) pairs".into()));
    }
    if times.iter().chain(values).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidTimeGrid("decay fit needs positive times and values".into()));
    }
    let ly: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let lt: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ls: Vec<f64> = times.iter().map(|t| (1.0 + t).ln()).collect();
    let (a, ra) = line_fit(&lt, &ly);
    let (b, rb) = line_fit(&ls, &ly);
    Ok(DecayFit {
        power_exponent: -a,
        power_rms: ra,
        shifted_exponent: -b,
        shifted_rms: rb,
        better: if ra <= rb { DecayModel::Power } else { DecayModel::Shifted },
    })
}

/// `ratio(t) = t^{n(1/2 − 1/p) + α} ‖A^α U(t) f‖_{L^p} / ‖f‖_{L^{p′}}` with
/// `U(t)` the free propagator from `(f, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersiveReport {
    pub p: f64,
    pub alpha: f64,
    pub times: Vec<f64>,
    /// `‖A^α U(t) f‖_{L^p}`
    pub norms: Vec<f64>,
    pub ratios: Vec<f64>,
    /// `‖f‖_{L^{p′}}`
    pub data_norm: f64,
    /// Fit of `norms` over the positive times.
    pub fit: Option<DecayFit>,
    /// The latest admissible time, a quarter of the shortest box side.
    pub wrap_bound: f64,
}

/// `A^α U(t) f` at each time, in Fourier space.
pub fn free_evolution(op: &OperatorSpec, alpha: f64, data: &SpectralField, times: &[f64]) -> Vec<SpectralField> {
    let shifts = data.grid().xi_squared();
    let d = data.hdim();
    let coords: Vec<Vec<Complex64>> =
        (0..shifts.len()).into_par_iter().map(|p| op.to_eigenbasis(data.fiber(p))).collect();
    let lam = op.eigenvalues();
    let powers: Vec<f64> = lam.iter().map(|l| l.powf(alpha)).collect();
    times
        .iter()
        .map(|&t| {
            let mut out = SpectralField::zeros(data.grid(), d);
            out.values_mut().par_chunks_mut(d).enumerate().for_each(|(p, fiber)| {
                let w: Vec<Complex64> = coords[p]
                    .iter()
                    .enumerate()
                    .map(|(i, x)| x * (powers[i] * (t * (lam[i] + shifts[p]).sqrt()).cos()))
                    .collect();
                fiber.copy_from_slice(&op.from_eigenbasis(&w));
            });
            out
        })
        .collect()
}

/// Dispersive ratio series for `2 ≤ p ≤ ∞`, `0 ≤ α < 1`.
///
/// Times must stay below a quarter of the shortest box side so that no
/// wavefront wraps around the torus.
pub fn dispersive_ratio(
    op: &OperatorSpec,
    alpha: f64,
    p: f64,
    data: &Field,
    times: &[f64],
) -> Result<DispersiveReport> {
    if !(p >= 2.0) {
        return Err(Error::InvalidExponent(format!("p = {p} must lie in [2, inf]")));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidExponent(format!("alpha = {alpha} must lie in [0, 1)")));
    }
    if data.hdim() != op.hdim() {
        return Err(Error::ShapeMismatch("data and operator dimensions differ".into()));
    }
    let wrap_bound = data.grid().min_length() / 4.0;
    if let Some(&t) = times.iter().find(|&&t| !(t >= 0.0 && t <= wrap_bound)) {
        return Err(Error::BeyondWraparound { t, bound: wrap_bound });
    }
    let n = data.grid().dim() as f64;
    let p_dual = if p.is_infinite() { 1.0 } else { p / (p - 1.0) };
    let data_norm = lebesgue_norm(data, p_dual)?;
    let spectral = forward_transform(data)?;
    let norms = free_evolution(op, alpha, &spectral, times)
        .iter()
        .map(|g| lebesgue_norm(&inverse_transform(g), p))
        .collect::<Result<Vec<_>>>()?;
    let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p };
    let exponent = n * (0.5 - inv_p) + alpha;
    let ratios = times
        .iter()
        .zip(&norms)
        .map(|(&t, &v)| if data_norm == 0.0 { 0.0 } else { t.powf(exponent) * v / data_norm })
        .collect();
    let (ft, fv): (Vec<f64>, Vec<f64>) = times.iter().zip(&norms).filter(|(t, v)| **t > 0.0 && **v > 0.0).unzip();
    let fit = if ft.len() >= 2 { Some(fit_decay(&ft, &fv)?) } else { None };
    Ok(DispersiveReport { p, alpha, times: times.to_vec(), norms, ratios, data_norm, fit, wrap_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;

    fn gaussian(grid: &GridSpec) -> Field {
        let l = grid.lengths()[0];
        Field::from_fn(grid, 1, |x| {
            let r2: f64 = x.iter().map(|v| (v - l / 2.0).powi(2)).sum();
            vec![Complex64::new((-r2).exp(), 0.0)]
        })
        .unwrap()
    }

    #[test]
    fn fits_exact_power_laws() {
        let t: Vec<f64> = (1..20).map(|j| j as f64).collect();
        let v: Vec<f64> = t.iter().map(|t| 3.0 * t.powf(-1.25)).collect();
        let f = fit_decay(&t, &v).unwrap();
        assert!((f.power_exponent - 1.25).abs() < 1e-12);
        assert_eq!(f.better, DecayModel::Power);
        let w: Vec<f64> = t.iter().map(|t| (1.0 + t).powf(-0.5)).collect();
        let g = fit_decay(&t, &w).unwrap();
        assert!((g.shifted_exponent - 0.5).abs() < 1e-12);
        assert_eq!(g.better, DecayModel::Shifted);
    }

    #[test]
    fn energy_case_is_bounded() {
        let grid = GridSpec::cube(2, 64, 32.0).unwrap();
        let op = OperatorSpec::scalar(1.0).unwrap();
        let times: Vec<f64> = (0..8).map(|j| j as f64).collect();
        let r = dispersive_ratio(&op, 0.0, 2.0, &gaussian(&grid), &times).unwrap();
        assert!(r.ratios.iter().all(|&x| x <= 1.0 + 1e-10));
        assert!((r.ratios[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_times_past_wraparound() {
        let grid = GridSpec::cube(2, 16, 8.0).unwrap();
        let op = OperatorSpec::scalar(1.0).unwrap();
        match dispersive_ratio(&op, 0.0, f64::INFINITY, &gaussian(&grid), &[1.0, 2.5]) {
            Err(Error::BeyondWraparound { bound, .. }) => assert_eq!(bound, 2.0),
            other => panic!("{other:?}"),
        }
        assert!(dispersive_ratio(&op, 1.0, 2.0, &gaussian(&grid), &[1.0]).is_err());
    }
}
