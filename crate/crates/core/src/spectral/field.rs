use num_complex::Complex64;

use super::GridSpec;
use crate::{Error, Result};

/// An `H = ℂ^d`-valued function sampled on a grid.
///
/// `values[point * hdim + component]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    hdim: usize,
    values: Vec<Complex64>,
}

/// Fourier coefficients of a [`Field`], indexed by integer frequency in the
/// layout of [`GridSpec::frequency`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    hdim: usize,
    values: Vec<Complex64>,
}

fn check_shape(grid: &GridSpec, hdim: usize, len: usize) -> Result<()> {
    if hdim == 0 {
        return Err(Error::ShapeMismatch("fiber dimension must be at least 1".into()));
    }
    if len != grid.len() * hdim {
        return Err(Error::ShapeMismatch(format!("{len} values for {} points x {hdim} components", grid.len())));
    }
    Ok(())
}

fn check_finite(values: &[Complex64], hdim: usize) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFinite { location: format!("point {} component {}", i / hdim, i % hdim) }),
        None => Ok(()),
    }
}

macro_rules! shared_field_api {
    ($ty:ident) => {
        impl $ty {
            /// Wraps raw values; rejects wrong lengths and non-finite entries.
            pub fn new(grid: GridSpec, hdim: usize, values: Vec<Complex64>) -> Result<Self> {
                check_shape(&grid, hdim, values.len())?;
                check_finite(&values, hdim)?;
                Ok(Self { grid, hdim, values })
            }

            pub fn zeros(grid: &GridSpec, hdim: usize) -> Self {
                Self { grid: grid.clone(), hdim, values: vec![Complex64::new(0.0, 0.0); grid.len() * hdim] }
            }

            pub(crate) fn from_parts_unchecked(grid: GridSpec, hdim: usize, values: Vec<Complex64>) -> Self {
                debug_assert_eq!(values.len(), grid.len() * hdim);
                Self { grid, hdim, values }
            }

            pub fn grid(&self) -> &GridSpec {
                &self.grid
            }

            pub fn hdim(&self) -> usize {
                self.hdim
            }

            pub fn values(&self) -> &[Complex64] {
                &self.values
            }

            pub fn values_mut(&mut self) -> &mut [Complex64] {
                &mut self.values
            }

            pub fn into_values(self) -> Vec<Complex64> {
                self.values
            }

            /// Fiber vector at a flat index.
            pub fn fiber(&self, index: usize) -> &[Complex64] {
                &self.values[index * self.hdim..(index + 1) * self.hdim]
            }

            pub fn fiber_mut(&mut self, index: usize) -> &mut [Complex64] {
                let d = self.hdim;
                &mut self.values[index * d..(index + 1) * d]
            }

            pub fn same_shape(&self, other: &Self) -> bool {
                self.hdim == other.hdim && self.grid == other.grid
            }

            pub(crate) fn ensure_same_shape(&self, other: &Self) -> Result<()> {
                if self.same_shape(other) {
                    Ok(())
                } else {
                    Err(Error::ShapeMismatch("fields live on different grids or fibers".into()))
                }
            }

            pub fn scaled(&self, c: Complex64) -> Self {
                let values = self.values.iter().map(|v| v * c).collect();
                Self::from_parts_unchecked(self.grid.clone(), self.hdim, values)
            }

            /// `self + c * other`.
            pub fn axpy(&self, c: Complex64, other: &Self) -> Result<Self> {
                self.ensure_same_shape(other)?;
                let values = self.values.iter().zip(&other.values).map(|(a, b)| a + c * b).collect();
                Ok(Self::from_parts_unchecked(self.grid.clone(), self.hdim, values))
            }

            pub fn is_finite(&self) -> bool {
                self.values.iter().all(|v| v.is_finite())
            }
        }
    };
}

shared_field_api!(Field);
shared_field_api!(SpectralField);

impl Field {
    /// Samples `f(x)` at every grid point.
    pub fn from_fn(grid: &GridSpec, hdim: usize, mut f: impl FnMut(&[f64]) -> Vec<Complex64>) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len() * hdim);
        for flat in 0..grid.len() {
            let fiber = f(&grid.coordinate(flat));
            if fiber.len() != hdim {
                return Err(Error::ShapeMismatch(format!(
                    "generator returned {} components, expected {hdim}",
                    fiber.len()
                )));
            }
            values.extend(fiber);
        }
        Self::new(grid.clone(), hdim, values)
    }

    /// True when every entry has zero imaginary part up to `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.im.abs() <= tol)
    }

    /// Pointwise fiber norms `‖f(x)‖_H`.
    pub fn fiber_norms(&self) -> Vec<f64> {
        self.values.chunks(self.hdim).map(|c| c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()).collect()
    }
}

impl SpectralField {
    /// Physical wavevector of a flat spectral index.
    pub fn wavevector(&self, index: usize) -> Vec<f64> {
        self.grid.wavevector(index)
    }

    pub fn frequency(&self, index: usize) -> Vec<i64> {
        self.grid.frequency(index)
    }

    /// Mode count (spatial size of the grid).
    pub fn modes(&self) -> usize {
        self.grid.len()
    }

    /// `Σ_k |ĝ_k|²` over all modes and components.
    pub fn energy_sum(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// `L²` norm of the physical field this spectrum represents (unitary
    /// transform plus cell-volume weight).
    pub fn l2_norm(&self) -> f64 {
        (self.energy_sum() * self.grid.cell_volume()).sqrt()
    }

    /// True when `ĝ(-k) = conj(ĝ(k))` for every mode, to `tol` relative.
    pub fn is_conjugate_symmetric(&self, tol: f64) -> bool {
        let scale = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        (0..self.modes()).all(|i| {
            let k: Vec<i64> = self.frequency(i).iter().map(|k| -k).collect();
            let j = self.grid.frequency_index(&k);
            self.fiber(i).iter().zip(self.fiber(j)).all(|(a, b)| (a - b.conj()).norm() <= tol * scale)
        })
    }
}
