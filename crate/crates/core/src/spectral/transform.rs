use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};

use super::{Field, GridSpec, SpectralField};
use crate::{Error, Result};

/// Unitary DFT (`1/√N` per axis) of every component.
pub fn forward_transform(f: &Field) -> Result<SpectralField> {
    if let Some(i) = f.values().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            location: format!("forward transform input, point {} component {}", i / f.hdim(), i % f.hdim()),
        });
    }
    let mut values = f.values().to_vec();
    transform_in_place(&mut values, f.grid(), f.hdim(), FftDirection::Forward);
    Ok(SpectralField::from_parts_unchecked(f.grid().clone(), f.hdim(), values))
}

/// Inverse of [`forward_transform`].
pub fn inverse_transform(g: &SpectralField) -> Field {
    let mut values = g.values().to_vec();
    transform_in_place(&mut values, g.grid(), g.hdim(), FftDirection::Inverse);
    Field::from_parts_unchecked(g.grid().clone(), g.hdim(), values)
}

pub(crate) fn transform_in_place(values: &mut [Complex64], grid: &GridSpec, hdim: usize, direction: FftDirection) {
    let points = grid.points();
    let mut planner = FftPlanner::<f64>::new();
    let mut buffer = vec![Complex64::new(0.0, 0.0); values.len()];
    for axis in 0..points.len() {
        let n = points[axis];
        let fft = planner.plan_fft(n, direction);
        let inner: usize = hdim * points[axis + 1..].iter().product::<usize>();
        let outer: usize = points[..axis].iter().product();
        // gather every line along `axis` contiguously
        for o in 0..outer {
            for i in 0..inner {
                let line = o * inner + i;
                let base = o * n * inner + i;
                for j in 0..n {
                    buffer[line * n + j] = values[base + j * inner];
                }
            }
        }
        fft.process(&mut buffer);
        let scale = 1.0 / (n as f64).sqrt();
        for o in 0..outer {
            for i in 0..inner {
                let line = o * inner + i;
                let base = o * n * inner + i;
                for j in 0..n {
                    values[base + j * inner] = buffer[line * n + j] * scale;
                }
            }
        }
    }
}

/// Left-multiplies every mode's fiber vector by `m(ξ)`.
///
/// The multiplier must return a `d × d` matrix with finite entries.
pub fn apply_multiplier<M>(g: &SpectralField, m: M) -> Result<SpectralField>
where
    M: Fn(&[f64]) -> DMatrix<Complex64> + Sync,
{
    let d = g.hdim();
    let grid = g.grid();
    let fibers: Vec<Result<Vec<Complex64>>> = (0..g.modes())
        .into_par_iter()
        .map(|mode| {
            let xi = grid.wavevector(mode);
            let mat = m(&xi);
            if mat.nrows() != d || mat.ncols() != d {
                return Err(Error::ShapeMismatch(format!(
                    "multiplier is {}x{}, fiber dimension is {d}",
                    mat.nrows(),
                    mat.ncols()
                )));
            }
            if mat.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteMultiplier { frequency: grid.frequency(mode) });
            }
            let v = DVector::from_column_slice(g.fiber(mode));
            Ok((mat * v).as_slice().to_vec())
        })
        .collect();
    let mut values = Vec::with_capacity(g.values().len());
    for fiber in fibers {
        values.extend(fiber?);
    }
    Ok(SpectralField::from_parts_unchecked(grid.clone(), d, values))
}

/// Multiplies every mode by a scalar weight `w(ξ)`.
pub fn apply_scalar_multiplier<W>(g: &SpectralField, w: W) -> Result<SpectralField>
where
    W: Fn(&[f64]) -> Complex64,
{
    let d = g.hdim();
    let grid = g.grid();
    let mut out = g.clone();
    for mode in 0..g.modes() {
        let weight = w(&grid.wavevector(mode));
        if !weight.is_finite() {
            return Err(Error::NonFiniteMultiplier { frequency: grid.frequency(mode) });
        }
        for v in out.fiber_mut(mode) {
            *v *= weight;
        }
    }
    debug_assert_eq!(out.hdim(), d);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn random_field(grid: &GridSpec, hdim: usize, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..grid.len() * hdim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Field::new(grid.clone(), hdim, values).unwrap()
    }

    fn rel_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        let den: f64 = a.iter().map(|x| x.norm_sqr()).sum();
        (num / den).sqrt()
    }

    #[test]
    fn constant_field_is_zero_mode() {
        let grid = GridSpec::new(vec![8, 16], vec![1.0, 3.0]).unwrap();
        let c = Complex64::new(2.5, -1.0);
        let f = Field::from_fn(&grid, 1, |_| vec![c]).unwrap();
        let g = forward_transform(&f).unwrap();
        for (i, v) in g.values().iter().enumerate() {
            if i == 0 {
                assert!((v - c * (grid.len() as f64).sqrt()).norm() < 1e-12);
            } else {
                assert!(v.norm() <= 1e-13 * c.norm());
            }
        }
    }

    #[test]
    fn single_mode_has_one_coefficient() {
        let l = 3.0;
        let grid = GridSpec::new(vec![16, 8], vec![l, 2.0]).unwrap();
        let f = Field::from_fn(&grid, 1, |x| vec![Complex64::from_polar(1.0, 2.0 * PI * x[0] / l)]).unwrap();
        let g = forward_transform(&f).unwrap();
        let target = grid.frequency_index(&[1, 0]);
        for (i, v) in g.values().iter().enumerate() {
            if i == target {
                assert!(v.norm() > 1.0);
            } else {
                assert!(v.norm() < 1e-12, "mode {i}: {v}");
            }
        }
    }

    #[test]
    fn round_trip_and_plancherel() {
        let grid = GridSpec::new(vec![8, 4, 16], vec![1.0, 2.0, 0.5]).unwrap();
        let f = random_field(&grid, 3, 7);
        let g = forward_transform(&f).unwrap();
        let back = inverse_transform(&g);
        assert!(rel_diff(f.values(), back.values()) <= 1e-12);
        let lhs: f64 = f.values().iter().map(|v| v.norm_sqr()).sum();
        assert!((lhs - g.energy_sum()).abs() <= 1e-12 * lhs);
    }

    #[test]
    fn real_fields_have_conjugate_symmetric_spectra() {
        let grid = GridSpec::new(vec![8, 8], vec![1.0, 1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let values = (0..grid.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect();
        let f = Field::new(grid.clone(), 1, values).unwrap();
        assert!(forward_transform(&f).unwrap().is_conjugate_symmetric(1e-12));
        let c = random_field(&grid, 1, 4);
        assert!(!forward_transform(&c).unwrap().is_conjugate_symmetric(1e-12));
    }

    #[test]
    fn non_finite_input_rejected() {
        let grid = GridSpec::new(vec![4], vec![1.0]).unwrap();
        let mut f = Field::zeros(&grid, 1);
        f.values_mut()[2] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(forward_transform(&f), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn identity_multiplier_is_bitwise_identity() {
        let grid = GridSpec::new(vec![8, 8], vec![1.0, 1.0]).unwrap();
        let g = forward_transform(&random_field(&grid, 2, 11)).unwrap();
        let out = apply_multiplier(&g, |_| DMatrix::identity(2, 2)).unwrap();
        assert_eq!(out.values(), g.values());
    }

    #[test]
    fn laplacian_symbol_on_unit_mode() {
        let grid = GridSpec::new(vec![16], vec![2.0 * PI]).unwrap();
        let f = Field::from_fn(&grid, 1, |x| vec![Complex64::from_polar(1.0, x[0])]).unwrap();
        let g = forward_transform(&f).unwrap();
        let out = apply_multiplier(&g, |xi| {
            let s: f64 = xi.iter().map(|x| x * x).sum();
            DMatrix::from_element(1, 1, Complex64::new(s, 0.0))
        })
        .unwrap();
        assert!(rel_diff(out.values(), g.values()) < 1e-14);
    }

    #[test]
    fn bracket_multiplier_matches_mode_loop() {
        let grid = GridSpec::new(vec![8, 16], vec![2.0, 5.0]).unwrap();
        let g = forward_transform(&random_field(&grid, 2, 5)).unwrap();
        let s = 1.3;
        let out = apply_multiplier(&g, |xi| {
            let w = (1.0 + xi.iter().map(|x| x * x).sum::<f64>()).powf(s / 2.0);
            DMatrix::from_diagonal_element(2, 2, Complex64::new(w, 0.0))
        })
        .unwrap();
        // reference: explicit per-mode loop over integer frequencies
        for mode in 0..grid.len() {
            let k = grid.frequency(mode);
            let xi2: f64 = k.iter().zip(grid.lengths()).map(|(&k, &l)| (2.0 * PI * k as f64 / l).powi(2)).sum();
            let w = (1.0 + xi2).powf(s / 2.0);
            for c in 0..2 {
                let expect = g.fiber(mode)[c] * w;
                assert!((out.fiber(mode)[c] - expect).norm() <= 1e-14 * expect.norm().max(1.0));
            }
        }
    }

    #[test]
    fn non_finite_multiplier_names_frequency() {
        let grid = GridSpec::new(vec![4], vec![2.0 * PI]).unwrap();
        let g = SpectralField::zeros(&grid, 1);
        let err = apply_multiplier(&g, |xi| {
            let v = if xi[0] == 0.0 { f64::INFINITY } else { 1.0 };
            DMatrix::from_element(1, 1, Complex64::new(v, 0.0))
        })
        .unwrap_err();
        match err {
            Error::NonFiniteMultiplier { frequency } => assert_eq!(frequency, vec![0]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn multipliers_compose() {
        let grid = GridSpec::new(vec![8, 8], vec![1.0, 2.0]).unwrap();
        let g = forward_transform(&random_field(&grid, 2, 9)).unwrap();
        let m1 = |xi: &[f64]| {
            DMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex64::new(1.0 + xi[0], 0.0),
                    Complex64::new(0.0, xi[1]),
                    Complex64::new(0.5, 0.0),
                    Complex64::new(2.0, -xi[0]),
                ],
            )
        };
        let m2 = |xi: &[f64]| {
            DMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex64::new(xi[1].cos(), 0.0),
                    Complex64::new(1.0, 0.0),
                    Complex64::new(0.0, 1.0),
                    Complex64::new(xi[0].sin(), 0.3),
                ],
            )
        };
        let seq = apply_multiplier(&apply_multiplier(&g, m2).unwrap(), m1).unwrap();
        let joint = apply_multiplier(&g, |xi| m1(xi) * m2(xi)).unwrap();
        assert!(rel_diff(seq.values(), joint.values()) < 1e-13);
    }
}
