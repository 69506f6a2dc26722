use num_complex::Complex64;
use rayon::prelude::*;

use super::duhamel::{eigen_rhs, propagate_eigen};
use super::{
    assemble_mode_system, mode_determinant, solve_initial_pair, ModeSource, MultipointSpec, DEFAULT_CONDITION_CAP,
};
use crate::operator::OperatorSpec;
use crate::spectral::{forward_transform, Field, GridSpec, SpectralField, SpectralTrajectory, TimeGrid};
use crate::{Error, Result};

/// The forcing `F(t, x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Zero,
    /// Fourier coefficients sampled on a uniform time grid, linear in between.
    Sampled {
        times: TimeGrid,
        samples: Vec<SpectralField>,
    },
}

impl Source {
    /// Transforms physical samples `F(t_j, ·)`.
    pub fn sampled(times: TimeGrid, fields: &[Field]) -> Result<Self> {
        let samples = fields.iter().map(forward_transform).collect::<Result<Vec<_>>>()?;
        Self::spectral(times, samples)
    }

    pub fn spectral(times: TimeGrid, samples: Vec<SpectralField>) -> Result<Self> {
        if samples.len() != times.len() {
            return Err(Error::ShapeMismatch(format!("{} source samples for {} times", samples.len(), times.len())));
        }
        for s in &samples {
            samples[0].ensure_same_shape(s)?;
        }
        Ok(Self::Sampled { times, samples })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Zero)
    }

    /// Last covered time; infinite for [`Source::Zero`].
    pub fn horizon(&self) -> f64 {
        match self {
            Self::Zero => f64::INFINITY,
            Self::Sampled { times, .. } => times.horizon(),
        }
    }

    /// The time series of one mode.
    pub fn mode(&self, index: usize, hdim: usize) -> ModeSource {
        match self {
            Self::Zero => ModeSource::zero(hdim),
            Self::Sampled { times, samples } => {
                let values = samples.iter().flat_map(|s| s.fiber(index).iter().copied()).collect();
                ModeSource::new(times.dt(), hdim, values).expect("validated source samples")
            }
        }
    }

    /// `F̂(t, ·)` by linear interpolation.
    pub fn at(&self, t: f64, grid: &GridSpec, hdim: usize) -> Result<SpectralField> {
        match self {
            Self::Zero => Ok(SpectralField::zeros(grid, hdim)),
            Self::Sampled { times, samples } => {
                let end = times.horizon();
                if !(t >= 0.0 && t <= end * (1.0 + 1e-9)) {
                    return Err(Error::TimeOutOfRange { t, end });
                }
                let j = ((t / times.dt()).floor() as usize).min(times.steps() - 1);
                let s = Complex64::new((t - times.time(j)) / times.dt(), 0.0);
                let (a, b) = (&samples[j], &samples[j + 1]);
                a.axpy(s, &b.axpy(Complex64::new(-1.0, 0.0), a)?)
            }
        }
    }
}

/// `u_tt − Δu + Au = F` on `[0, horizon]` with data `φ`, `ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProblem {
    operator: OperatorSpec,
    phi: Field,
    psi: Field,
    source: Source,
    horizon: f64,
}

impl LinearProblem {
    pub fn new(operator: OperatorSpec, phi: Field, psi: Field, source: Source, horizon: f64) -> Result<Self> {
        phi.ensure_same_shape(&psi)?;
        if phi.hdim() != operator.hdim() {
            return Err(Error::ShapeMismatch(format!(
                "data has {} components, operator acts on {}",
                phi.hdim(),
                operator.hdim()
            )));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidTimeGrid(format!("horizon {horizon} must be positive")));
        }
        if let Source::Sampled { samples, .. } = &source {
            if samples[0].grid() != phi.grid() || samples[0].hdim() != phi.hdim() {
                return Err(Error::ShapeMismatch("source samples do not match the data grid".into()));
            }
        }
        let end = source.horizon();
        if end < horizon * (1.0 - 1e-9) {
            return Err(Error::TimeOutOfRange { t: horizon, end });
        }
        Ok(Self { operator, phi, psi, source, horizon })
    }

    /// Homogeneous problem.
    pub fn homogeneous(operator: OperatorSpec, phi: Field, psi: Field, horizon: f64) -> Result<Self> {
        Self::new(operator, phi, psi, Source::Zero, horizon)
    }

    pub fn grid(&self) -> &GridSpec {
        self.phi.grid()
    }

    pub fn hdim(&self) -> usize {
        self.phi.hdim()
    }

    pub fn operator(&self) -> &OperatorSpec {
        &self.operator
    }

    pub fn phi(&self) -> &Field {
        &self.phi
    }

    pub fn psi(&self) -> &Field {
        &self.psi
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Same data and operator, different forcing.
    pub fn with_source(&self, source: Source) -> Result<Self> {
        Self::new(self.operator.clone(), self.phi.clone(), self.psi.clone(), source, self.horizon)
    }

    /// Same operator and forcing, different data.
    pub fn with_data(&self, phi: Field, psi: Field) -> Result<Self> {
        Self::new(self.operator.clone(), phi, psi, self.source.clone(), self.horizon)
    }

    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        Self::new(self.operator.clone(), self.phi.clone(), self.psi.clone(), self.source.clone(), horizon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Modes with `‖D(ξ)⁻¹‖` above this count as singular.
    pub condition_cap: f64,
    /// Adds `½ Σ β_k F̂(λ_k)` to `f2`.
    pub half_source_term: bool,
    /// Uses `S(λ_k − τ)` instead of `C(λ_k − τ)` in the Duhamel term of `f2`.
    pub sine_rate_kernel: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { condition_cap: DEFAULT_CONDITION_CAP, half_source_term: false, sine_rate_kernel: false }
    }
}

/// Mode statistics of one solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub modes: usize,
    /// `min_ξ |det D(ξ)|`
    pub min_abs_det: f64,
    /// `max_ξ ‖D(ξ)‖ ‖D(ξ)⁻¹‖`
    pub max_condition: f64,
    /// `max_ξ ‖D(ξ)⁻¹‖`
    pub max_inverse_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolution {
    pub trajectory: SpectralTrajectory,
    /// `û(0)`
    pub u0: SpectralField,
    /// `∂_t û(0)`
    pub u1: SpectralField,
    pub report: SolveReport,
}

struct ModeOutcome {
    u0: Vec<Complex64>,
    u1: Vec<Complex64>,
    abs_det: f64,
    condition: f64,
    inverse_norm: f64,
    samples: Vec<(Vec<Complex64>, Vec<Complex64>)>,
}

fn solve_mode(
    problem: &LinearProblem,
    spec: &MultipointSpec,
    phi: &SpectralField,
    psi: &SpectralField,
    shifts: &[f64],
    index: usize,
    options: &SolverOptions,
    times: &[f64],
) -> Result<ModeOutcome> {
    let op = problem.operator();
    let shifted = op.shifted(shifts[index]);
    let blocks = assemble_mode_system(spec, &shifted).at_frequency(phi.frequency(index));
    let det = mode_determinant(&blocks, options.condition_cap)?;

    let src = problem.source().mode(index, problem.hdim()).eigen(op);
    let freqs = shifted.frequencies();
    let (f1, f2) = eigen_rhs(
        spec,
        &freqs,
        &src,
        &op.to_eigenbasis(phi.fiber(index)),
        &op.to_eigenbasis(psi.fiber(index)),
        options,
    );
    let (u0, u1) = solve_initial_pair(&blocks, &det, &op.from_eigenbasis(&f1), &op.from_eigenbasis(&f2))?;
    let samples = if times.is_empty() {
        Vec::new()
    } else {
        propagate_eigen(&freqs, &op.to_eigenbasis(&u0), &op.to_eigenbasis(&u1), &src, times)
            .into_iter()
            .map(|(u, ut)| (op.from_eigenbasis(&u), op.from_eigenbasis(&ut)))
            .collect()
    };
    Ok(ModeOutcome {
        u0,
        u1,
        abs_det: det.det.norm(),
        condition: det.condition,
        inverse_norm: det.inverse_norm,
        samples,
    })
}

fn solve_all(
    problem: &LinearProblem,
    spec: &MultipointSpec,
    options: &SolverOptions,
    times: &[f64],
) -> Result<(Vec<ModeOutcome>, SolveReport)> {
    spec.check_horizon(problem.horizon())?;
    if let Some(&t) = times.last() {
        let end = problem.source().horizon();
        if t > end * (1.0 + 1e-9) {
            return Err(Error::TimeOutOfRange { t, end });
        }
    }
    let phi = forward_transform(problem.phi())?;
    let psi = forward_transform(problem.psi())?;
    let shifts = problem.grid().xi_squared();
    let results: Vec<Result<ModeOutcome>> = (0..shifts.len())
        .into_par_iter()
        .map(|p| solve_mode(problem, spec, &phi, &psi, &shifts, p, options, times))
        .collect();

    let mut outcomes = Vec::with_capacity(results.len());
    let mut singular = Vec::new();
    for r in results {
        match r {
            Ok(o) => outcomes.push(o),
            Err(Error::SingularModes { frequencies }) => singular.extend(frequencies),
            Err(e) => return Err(e),
        }
    }
    if !singular.is_empty() {
        return Err(Error::SingularModes { frequencies: singular });
    }
    let report = SolveReport {
        modes: outcomes.len(),
        min_abs_det: outcomes.iter().map(|o| o.abs_det).fold(f64::INFINITY, f64::min),
        max_condition: outcomes.iter().map(|o| o.condition).fold(0.0, f64::max),
        max_inverse_norm: outcomes.iter().map(|o| o.inverse_norm).fold(0.0, f64::max),
    };
    Ok((outcomes, report))
}

fn scatter(grid: &GridSpec, hdim: usize, fibers: impl Iterator<Item = Vec<Complex64>>) -> SpectralField {
    let values: Vec<Complex64> = fibers.flatten().collect();
    SpectralField::from_parts_unchecked(grid.clone(), hdim, values)
}

/// Solves only for the initial pair `(û(0), ∂_t û(0))`.
pub fn initial_pair(
    problem: &LinearProblem,
    spec: &MultipointSpec,
    options: &SolverOptions,
) -> Result<(SpectralField, SpectralField, SolveReport)> {
    let (outcomes, report) = solve_all(problem, spec, options, &[])?;
    let (grid, d) = (problem.grid(), problem.hdim());
    let u0 = scatter(grid, d, outcomes.iter().map(|o| o.u0.clone()));
    let u1 = scatter(grid, d, outcomes.iter().map(|o| o.u1.clone()));
    Ok((u0, u1, report))
}

/// Full pipeline: transform the data, solve every mode system, propagate to
/// every time of `times`.
///
/// Fails with [`Error::SingularModes`] listing every mode whose `D(ξ)` is
/// numerically singular.
pub fn solve_linear(
    problem: &LinearProblem,
    spec: &MultipointSpec,
    times: &TimeGrid,
    options: &SolverOptions,
) -> Result<LinearSolution> {
    let ts: Vec<f64> = times.times().collect();
    let (outcomes, report) = solve_all(problem, spec, options, &ts)?;
    let (grid, d) = (problem.grid(), problem.hdim());
    let mut values = Vec::with_capacity(ts.len());
    let mut rates = Vec::with_capacity(ts.len());
    for j in 0..ts.len() {
        values.push(scatter(grid, d, outcomes.iter().map(|o| o.samples[j].0.clone())));
        rates.push(scatter(grid, d, outcomes.iter().map(|o| o.samples[j].1.clone())));
    }
    let u0 = scatter(grid, d, outcomes.iter().map(|o| o.u0.clone()));
    let u1 = scatter(grid, d, outcomes.iter().map(|o| o.u1.clone()));
    let trajectory = SpectralTrajectory::new(*times, values, rates)?;
    Ok(LinearSolution { trajectory, u0, u1, report })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::spectral::inverse_transform;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    fn random_field(grid: &GridSpec, d: usize, rng: &mut ChaCha8Rng) -> Field {
        let l = grid.lengths()[0];
        let (x0, y0) = (rng.gen_range(0.3..0.7) * l, rng.gen_range(0.3..0.7) * l);
        let amps: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Field::from_fn(grid, d, |x| {
            let r2 = (x[0] - x0).powi(2) + (x[1] - y0).powi(2);
            amps.iter().map(|a| c(a * (-r2).exp())).collect()
        })
        .unwrap()
    }

    #[test]
    fn cauchy_single_mode_matches_closed_form() {
        let grid = GridSpec::cube(2, 8, 2.0 * PI).unwrap();
        let op = OperatorSpec::scalar(2.0).unwrap();
        let phi = Field::from_fn(&grid, 1, |x| vec![Complex64::from_polar(1.0, x[0] + 2.0 * x[1])]).unwrap();
        let problem = LinearProblem::homogeneous(op, phi.clone(), Field::zeros(&grid, 1), 2.0).unwrap();
        let times = TimeGrid::covering(2.0, 0.25).unwrap();
        let sol = solve_linear(&problem, &MultipointSpec::cauchy(), &times, &SolverOptions::default()).unwrap();
        let w = (2.0f64 + 5.0).sqrt();
        for (j, t) in times.times().enumerate() {
            let u = inverse_transform(sol.trajectory.value(j));
            for (a, b) in u.values().iter().zip(phi.values()) {
                assert!((a - b * (w * t).cos()).norm() < 1e-12);
            }
        }
        assert_eq!(sol.report.min_abs_det, 1.0);
    }

    #[test]
    fn superposition() {
        let grid = GridSpec::cube(2, 8, 4.0).unwrap();
        let op = OperatorSpec::diagonal(&[1.0, 2.5]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let spec = MultipointSpec::real(&[0.2, -0.1], &[0.15, 0.3], &[0.4, 1.0]).unwrap();
        let tg = TimeGrid::covering(1.0, 0.1).unwrap();
        let mk = |rng: &mut ChaCha8Rng| {
            let fs: Vec<Field> = (0..tg.len()).map(|_| random_field(&grid, 2, rng)).collect();
            LinearProblem::new(
                op.clone(),
                random_field(&grid, 2, rng),
                random_field(&grid, 2, rng),
                Source::sampled(tg, &fs).unwrap(),
                1.0,
            )
            .unwrap()
        };
        let (p1, p2) = (mk(&mut rng), mk(&mut rng));
        let (c1, c2) = (Complex64::new(0.7, 0.2), c(-1.3));
        let comb = |a: &Field, b: &Field| a.scaled(c1).axpy(c2, b).unwrap();
        let Source::Sampled { samples: s1, .. } = p1.source() else { unreachable!() };
        let Source::Sampled { samples: s2, .. } = p2.source() else { unreachable!() };
        let mixed: Vec<SpectralField> = s1.iter().zip(s2).map(|(a, b)| a.scaled(c1).axpy(c2, b).unwrap()).collect();
        let p3 = LinearProblem::new(
            op.clone(),
            comb(p1.phi(), p2.phi()),
            comb(p1.psi(), p2.psi()),
            Source::spectral(tg, mixed).unwrap(),
            1.0,
        )
        .unwrap();
        let opts = SolverOptions::default();
        let (a, b, m) = (
            solve_linear(&p1, &spec, &tg, &opts).unwrap(),
            solve_linear(&p2, &spec, &tg, &opts).unwrap(),
            solve_linear(&p3, &spec, &tg, &opts).unwrap(),
        );
        for j in 0..tg.len() {
            let expect = a.trajectory.value(j).scaled(c1).axpy(c2, b.trajectory.value(j)).unwrap();
            let diff = m.trajectory.value(j).axpy(c(-1.0), &expect).unwrap();
            assert!(diff.l2_norm() <= 1e-11 * expect.l2_norm().max(1.0));
        }
    }

    #[test]
    fn singular_modes_are_listed() {
        let grid = GridSpec::cube(1, 8, 2.0 * PI).unwrap();
        let op = OperatorSpec::scalar(1.0).unwrap();
        let phi = Field::from_fn(&grid, 1, |x| vec![c(x[0].cos())]).unwrap();
        let problem = LinearProblem::homogeneous(op, phi.clone(), phi, 2.0 * PI).unwrap();
        let spec = MultipointSpec::real(&[1.0], &[1.0], &[2.0 * PI]).unwrap();
        match initial_pair(&problem, &spec, &SolverOptions::default()) {
            Err(Error::SingularModes { frequencies }) => assert!(frequencies.contains(&vec![0])),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_lambda_beyond_horizon_and_short_source() {
        let grid = GridSpec::cube(1, 8, 1.0).unwrap();
        let op = OperatorSpec::scalar(1.0).unwrap();
        let z = Field::zeros(&grid, 1);
        let problem = LinearProblem::homogeneous(op.clone(), z.clone(), z.clone(), 1.0).unwrap();
        let spec = MultipointSpec::real(&[0.1], &[0.1], &[1.5]).unwrap();
        assert!(matches!(initial_pair(&problem, &spec, &SolverOptions::default()), Err(Error::InvalidMultipoint(_))));
        let tg = TimeGrid::covering(0.5, 0.1).unwrap();
        let src = Source::sampled(tg, &vec![z.clone(); tg.len()]).unwrap();
        assert!(LinearProblem::new(op, z.clone(), z, src, 1.0).is_err());
    }
}
