use super::{inverse_transform, mixed_norm, Field, GridSpec, SpectralField};
use crate::{Error, Result};

/// Uniform time grid `t_j = j·dt`, `j = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    dt: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, steps: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidTimeGrid(format!("time step {dt} must be positive")));
        }
        if steps == 0 {
            return Err(Error::InvalidTimeGrid("need at least one step".into()));
        }
        Ok(Self { dt, steps })
    }

    /// Grid on `[0, horizon]`; `horizon` must be an integer multiple of `dt`.
    pub fn covering(horizon: f64, dt: f64) -> Result<Self> {
        let steps = steps_for(horizon, dt)?;
        Self::new(dt, steps)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of samples (`steps + 1`).
    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn horizon(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|j| self.time(j))
    }

    /// Index of the sample at `t`, when `t` lies on the grid.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let x = t / self.dt;
        let j = x.round();
        ((x - j).abs() <= 1e-9 * x.abs().max(1.0) && j >= 0.0 && j as usize <= self.steps).then_some(j as usize)
    }
}

pub(crate) fn steps_for(horizon: f64, dt: f64) -> Result<usize> {
    if !(dt.is_finite() && dt > 0.0 && horizon.is_finite() && horizon > 0.0) {
        return Err(Error::InvalidTimeGrid(format!("horizon {horizon} / step {dt} must be positive")));
    }
    let x = horizon / dt;
    let n = x.round();
    if (x - n).abs() > 1e-9 * x.max(1.0) {
        return Err(Error::InvalidTimeGrid(format!("horizon {horizon} is not a multiple of dt = {dt}")));
    }
    Ok(n as usize)
}

/// Solution samples `û(t_j)` and `∂_t û(t_j)` on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTrajectory {
    times: TimeGrid,
    values: Vec<SpectralField>,
    rates: Vec<SpectralField>,
}

impl SpectralTrajectory {
    pub fn new(times: TimeGrid, values: Vec<SpectralField>, rates: Vec<SpectralField>) -> Result<Self> {
        if values.len() != times.len() || rates.len() != times.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} value and {} rate samples for {} times",
                values.len(),
                rates.len(),
                times.len()
            )));
        }
        let first = &values[0];
        for f in values.iter().chain(&rates) {
            first.ensure_same_shape(f)?;
            if !f.is_finite() {
                return Err(Error::NonFinite { location: "trajectory sample".into() });
            }
        }
        Ok(Self { times, values, rates })
    }

    pub fn times(&self) -> &TimeGrid {
        &self.times
    }

    pub fn grid(&self) -> &GridSpec {
        self.values[0].grid()
    }

    pub fn hdim(&self) -> usize {
        self.values[0].hdim()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `û(t_j)`.
    pub fn value(&self, j: usize) -> &SpectralField {
        &self.values[j]
    }

    /// `∂_t û(t_j)`.
    pub fn rate(&self, j: usize) -> &SpectralField {
        &self.rates[j]
    }

    pub fn values(&self) -> &[SpectralField] {
        &self.values
    }

    pub fn rates(&self) -> &[SpectralField] {
        &self.rates
    }

    /// Physical snapshots `u(t_j, ·)`.
    pub fn physical_values(&self) -> Vec<Field> {
        self.values.iter().map(inverse_transform).collect()
    }

    pub fn physical_rates(&self) -> Vec<Field> {
        self.rates.iter().map(inverse_transform).collect()
    }

    /// `‖u‖_{L^q_t L^r_x}` of the physical trajectory.
    pub fn mixed_norm(&self, q: f64, r: f64) -> Result<f64> {
        mixed_norm(&self.physical_values(), self.times.dt(), q, r)
    }

    /// Concatenates a trajectory that starts where this one ends; the shared
    /// sample is taken from `next`.
    pub fn append(&mut self, next: SpectralTrajectory) -> Result<()> {
        if (next.times.dt() - self.times.dt()).abs() > 1e-12 * self.times.dt() {
            return Err(Error::InvalidTimeGrid("appended trajectory has a different step".into()));
        }
        self.values[0].ensure_same_shape(&next.values[0])?;
        self.values.pop();
        self.rates.pop();
        self.values.extend(next.values);
        self.rates.extend(next.rates);
        self.times = TimeGrid::new(self.times.dt(), self.values.len() - 1)?;
        Ok(())
    }

    /// Keeps the samples `0..=steps`.
    pub fn truncate(&mut self, steps: usize) -> Result<()> {
        if steps == 0 || steps > self.times.steps() {
            return Err(Error::InvalidTimeGrid(format!("cannot truncate to {steps} steps")));
        }
        self.values.truncate(steps + 1);
        self.rates.truncate(steps + 1);
        self.times = TimeGrid::new(self.times.dt(), steps)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_grid_basics() {
        let t = TimeGrid::covering(1.0, 0.125).unwrap();
        assert_eq!(t.steps(), 8);
        assert_eq!(t.index_of(0.5), Some(4));
        assert_eq!(t.index_of(0.51), None);
        assert_eq!(t.index_of(1.5), None);
        assert!(TimeGrid::covering(1.0, 0.3).is_err());
        assert!(TimeGrid::new(0.0, 3).is_err());
    }
}
