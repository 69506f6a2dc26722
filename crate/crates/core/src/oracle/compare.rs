use crate::spectral::{inverse_transform, lebesgue_norm, mixed_norm, Field, SpectralField, SpectralTrajectory};
use crate::{Error, Result};

/// Differences between two trajectories on a shared axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareReport {
    /// `max_t ‖a − b‖_{L^∞}`
    pub sup: f64,
    /// `max_t ‖a − b‖_{L²}`
    pub l2: f64,
    /// `‖a − b‖_{L^q L^r}`
    pub mixed: f64,
    /// `l2 / max_t ‖a‖_{L²}`
    pub relative_l2: f64,
}

fn l2(g: &SpectralField) -> f64 {
    (g.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * g.grid().cell_volume()).sqrt()
}

/// `‖a − b‖_{L²} / ‖a‖_{L²}`; zero when both vanish.
pub fn relative_difference(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    a.ensure_same_shape(b)?;
    let diff = b.axpy(num_complex::Complex64::new(-1.0, 0.0), a)?;
    let (num, den) = (l2(&diff), l2(a));
    Ok(if num == 0.0 { 0.0 } else { num / den })
}

/// Compares `a` and `b` sample by sample.
pub fn compare(a: &SpectralTrajectory, b: &SpectralTrajectory, q: f64, r: f64) -> Result<CompareReport> {
    if a.times() != b.times() {
        return Err(Error::ShapeMismatch("trajectories have different time axes".into()));
    }
    if a.grid() != b.grid() || a.hdim() != b.hdim() {
        return Err(Error::ShapeMismatch("trajectories have different grids".into()));
    }
    let minus = num_complex::Complex64::new(-1.0, 0.0);
    let diffs = a.values().iter().zip(b.values()).map(|(x, y)| y.axpy(minus, x)).collect::<Result<Vec<_>>>()?;
    let physical: Vec<Field> = diffs.iter().map(inverse_transform).collect();
    let sup = physical.iter().map(|f| lebesgue_norm(f, f64::INFINITY)).try_fold(0.0_f64, |m, v| v.map(|v| m.max(v)))?;
    let l2_max = diffs.iter().map(l2).fold(0.0, f64::max);
    let scale = a.values().iter().map(l2).fold(0.0, f64::max);
    let mixed = if physical.len() >= 2 { mixed_norm(&physical, a.times().dt(), q, r)? } else { l2_max };
    Ok(CompareReport { sup, l2: l2_max, mixed, relative_l2: if l2_max == 0.0 { 0.0 } else { l2_max / scale } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{forward_transform, GridSpec, TimeGrid};
    use num_complex::Complex64;

    fn traj(eps: f64) -> SpectralTrajectory {
        let grid = GridSpec::cube(1, 16, 6.0).unwrap();
        let fields: Vec<SpectralField> = (0..5)
            .map(|j| {
                let f = Field::from_fn(&grid, 1, |x| {
                    let bump = if (x[0] - 3.0).abs() < 1e-9 && j == 2 { eps } else { 0.0 };
                    vec![Complex64::new((x[0] + j as f64).sin() + bump, 0.0)]
                })
                .unwrap();
                forward_transform(&f).unwrap()
            })
            .collect();
        SpectralTrajectory::new(TimeGrid::new(0.1, 4).unwrap(), fields.clone(), fields).unwrap()
    }

    #[test]
    fn identical_is_zero_and_perturbation_is_seen() {
        let a = traj(0.0);
        let r = compare(&a, &a, 2.0, 2.0).unwrap();
        assert_eq!((r.sup, r.l2, r.mixed), (0.0, 0.0, 0.0));
        let b = traj(1e-5);
        let r = compare(&a, &b, 2.0, 2.0).unwrap();
        assert!((r.sup - 1e-5).abs() < 1e-12);
        let other =
            SpectralTrajectory::new(TimeGrid::new(0.2, 4).unwrap(), b.values().to_vec(), b.rates().to_vec()).unwrap();
        assert!(compare(&a, &other, 2.0, 2.0).is_err());
    }
}
