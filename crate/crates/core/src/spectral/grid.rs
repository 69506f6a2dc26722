use std::f64::consts::PI;

use crate::{Error, Result};

/// Default cap on the total number of grid points.
pub const DEFAULT_POINT_CAP: usize = 1 << 24;

/// A periodic box `[0, L_1) × … × [0, L_n)` sampled on a uniform grid.
///
/// Point and frequency indices are flattened row-major: the first axis
/// varies slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    points: Vec<usize>,
    lengths: Vec<f64>,
}

impl GridSpec {
    pub fn new(points: Vec<usize>, lengths: Vec<f64>) -> Result<Self> {
        Self::with_cap(points, lengths, DEFAULT_POINT_CAP)
    }

    pub fn with_cap(points: Vec<usize>, lengths: Vec<f64>, cap: usize) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidGrid("dimension must be at least 1".into()));
        }
        if points.len() != lengths.len() {
            return Err(Error::InvalidGrid(format!("{} point counts but {} box lengths", points.len(), lengths.len())));
        }
        for (axis, &p) in points.iter().enumerate() {
            if p < 4 || !p.is_power_of_two() {
                return Err(Error::InvalidGrid(format!("axis {axis}: {p} points is not a power of two >= 4")));
            }
        }
        for (axis, &l) in lengths.iter().enumerate() {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidGrid(format!("axis {axis}: box length {l} must be positive")));
            }
        }
        let total = points
            .iter()
            .try_fold(1usize, |acc, &p| acc.checked_mul(p))
            .ok_or_else(|| Error::InvalidGrid("point count overflows".into()))?;
        if total > cap {
            return Err(Error::InvalidGrid(format!("{total} points exceed the cap of {cap}")));
        }
        Ok(Self { points, lengths })
    }

    /// `n`-dimensional cube with the same count and length on every axis.
    pub fn cube(n: usize, points: usize, length: f64) -> Result<Self> {
        Self::new(vec![points; n], vec![length; n])
    }

    pub fn dim(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.points[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    /// Shortest box side; wave fronts wrap around after half of it.
    pub fn min_length(&self) -> f64 {
        self.lengths.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Multi-index of a flat point index.
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            idx[axis] = flat % self.points[axis];
            flat /= self.points[axis];
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.points).fold(0, |acc, (&i, &p)| acc * p + i)
    }

    /// Physical coordinates of a grid point.
    pub fn coordinate(&self, flat: usize) -> Vec<f64> {
        self.unflatten(flat).into_iter().enumerate().map(|(axis, i)| i as f64 * self.spacing(axis)).collect()
    }

    /// Signed integer frequency of a flat spectral index; indices above
    /// `N/2` wrap to negative frequencies.
    pub fn frequency(&self, flat: usize) -> Vec<i64> {
        self.unflatten(flat).into_iter().zip(&self.points).map(|(j, &p)| signed_frequency(j, p)).collect()
    }

    /// Flat spectral index of an integer frequency vector (taken modulo the grid).
    pub fn frequency_index(&self, k: &[i64]) -> usize {
        let idx: Vec<usize> = k.iter().zip(&self.points).map(|(&ki, &p)| ki.rem_euclid(p as i64) as usize).collect();
        self.flatten(&idx)
    }

    /// Physical wavevector `ξ = 2πk/L`.
    pub fn wavevector(&self, flat: usize) -> Vec<f64> {
        self.frequency(flat).into_iter().zip(&self.lengths).map(|(k, &l)| 2.0 * PI * k as f64 / l).collect()
    }

    /// `|ξ|²` for every spectral index.
    pub fn xi_squared(&self) -> Vec<f64> {
        let per_axis: Vec<Vec<f64>> = self
            .points
            .iter()
            .zip(&self.lengths)
            .map(|(&p, &l)| {
                (0..p)
                    .map(|j| {
                        let xi = 2.0 * PI * signed_frequency(j, p) as f64 / l;
                        xi * xi
                    })
                    .collect()
            })
            .collect();
        (0..self.len())
            .map(|flat| self.unflatten(flat).iter().enumerate().map(|(axis, &j)| per_axis[axis][j]).sum())
            .collect()
    }
}

fn signed_frequency(j: usize, p: usize) -> i64 {
    if j <= p / 2 {
        j as i64
    } else {
        j as i64 - p as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(vec![6], vec![1.0]).is_err());
        assert!(GridSpec::new(vec![2], vec![1.0]).is_err());
        assert!(GridSpec::new(vec![8], vec![0.0]).is_err());
        assert!(GridSpec::new(vec![8, 8], vec![1.0]).is_err());
        assert!(GridSpec::with_cap(vec![64, 64], vec![1.0, 1.0], 1000).is_err());
        assert!(GridSpec::new(vec![], vec![]).is_err());
    }

    #[test]
    fn frequency_layout() {
        let g = GridSpec::new(vec![8, 4], vec![2.0 * PI, 1.0]).unwrap();
        assert_eq!(g.frequency(0), vec![0, 0]);
        assert_eq!(g.frequency(1), vec![0, 1]);
        assert_eq!(g.frequency(3), vec![0, -1]);
        assert_eq!(g.frequency(4 * 5), vec![-3, 0]);
        for flat in 0..g.len() {
            assert_eq!(g.frequency_index(&g.frequency(flat)), flat);
        }
        let xi2 = g.xi_squared();
        assert!((xi2[4] - 1.0).abs() < 1e-14);
    }
}
