use num_complex::Complex64;
use rayon::prelude::*;

use super::{advance, LinearProblem, MultipointSpec};
use crate::operator::OperatorSpec;
use crate::spectral::{forward_transform, SpectralField, SpectralTrajectory};
use crate::{Error, Result};

/// Measured defects of a trajectory against the equation and the
/// multipoint conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    /// `max_j ‖δ²_t u − Δu + Au − F‖_{L²}` over interior samples.
    pub pde_residual: f64,
    /// `max_j (‖(A − Δ)u‖_{L²} + ‖F‖_{L²})`, the scale of the residual.
    pub pde_scale: f64,
    /// `‖u(0) − φ − Σ α_k u(λ_k)‖`, relative.
    pub condition_u: f64,
    /// `‖u_t(0) − ψ − Σ β_k u_t(λ_k)‖`, relative.
    pub condition_ut: f64,
    /// `max_j |E(t_j) − E(0)| / E(0)` when there is no forcing.
    pub energy_drift: Option<f64>,
    pub dt: f64,
}

impl ResidualReport {
    pub fn relative_pde(&self) -> f64 {
        if self.pde_residual == 0.0 {
            0.0
        } else {
            self.pde_residual / self.pde_scale
        }
    }

    pub fn max_condition(&self) -> f64 {
        self.condition_u.max(self.condition_ut)
    }
}

fn l2(values: &[Complex64], dv: f64) -> f64 {
    (values.iter().map(|v| v.norm_sqr()).sum::<f64>() * dv).sqrt()
}

fn check_shape(traj: &SpectralTrajectory, problem: &LinearProblem) -> Result<()> {
    if traj.grid() != problem.grid() || traj.hdim() != problem.hdim() {
        return Err(Error::ShapeMismatch("trajectory does not match the problem grid".into()));
    }
    Ok(())
}

/// `(û(t), ∂_t û(t))`, propagated exactly from the last sample at or
/// before `t` when `t` is off the time grid.
pub fn evaluate_at(
    traj: &SpectralTrajectory,
    problem: &LinearProblem,
    t: f64,
) -> Result<(SpectralField, SpectralField)> {
    check_shape(traj, problem)?;
    let grid = traj.times();
    let end = grid.horizon();
    if !(t >= 0.0 && t <= end * (1.0 + 1e-9)) {
        return Err(Error::TimeOutOfRange { t, end });
    }
    if let Some(j) = grid.index_of(t) {
        return Ok((traj.value(j).clone(), traj.rate(j).clone()));
    }
    let j = ((t / grid.dt()).floor() as usize).min(grid.steps());
    let from = grid.time(j);
    let op = problem.operator();
    let d = problem.hdim();
    let shifts = problem.grid().xi_squared();
    let (u0, u1) = (traj.value(j), traj.rate(j));
    let per_mode: Vec<(Vec<Complex64>, Vec<Complex64>)> = (0..shifts.len())
        .into_par_iter()
        .map(|p| {
            let freqs = op.shifted(shifts[p]).frequencies();
            let src = problem.source().mode(p, d).eigen(op);
            let (u, ut) =
                advance(&freqs, &op.to_eigenbasis(u0.fiber(p)), &op.to_eigenbasis(u1.fiber(p)), &src, from, t);
            (op.from_eigenbasis(&u), op.from_eigenbasis(&ut))
        })
        .collect();
    let mut u = SpectralField::zeros(problem.grid(), d);
    let mut ut = SpectralField::zeros(problem.grid(), d);
    for (p, (a, b)) in per_mode.into_iter().enumerate() {
        u.fiber_mut(p).copy_from_slice(&a);
        ut.fiber_mut(p).copy_from_slice(&b);
    }
    Ok((u, ut))
}

/// `E(t_j) = ‖∂_t u‖² + ⟨(A − Δ)u, u⟩` for every sample.
pub fn energy(traj: &SpectralTrajectory, op: &OperatorSpec) -> Vec<f64> {
    let shifts = traj.grid().xi_squared();
    let dv = traj.grid().cell_volume();
    traj.values()
        .iter()
        .zip(traj.rates())
        .map(|(u, ut)| {
            let mut e = ut.energy_sum();
            for (p, &s) in shifts.iter().enumerate() {
                let au = op.apply_spectral(s, |mu| mu, u.fiber(p));
                e += au.iter().zip(u.fiber(p)).map(|(a, b)| (a * b.conj()).re).sum::<f64>();
            }
            e * dv
        })
        .collect()
}

/// Residuals of the equation (second differences in time, exact in space),
/// of both multipoint conditions, and the energy drift for unforced
/// problems.
pub fn verify_solution(
    traj: &SpectralTrajectory,
    problem: &LinearProblem,
    spec: &MultipointSpec,
) -> Result<ResidualReport> {
    check_shape(traj, problem)?;
    let times = traj.times();
    let dt = times.dt();
    let dv = problem.grid().cell_volume();
    let op = problem.operator();
    let d = problem.hdim();
    let shifts = problem.grid().xi_squared();

    let mut pde_residual: f64 = 0.0;
    let mut pde_scale: f64 = 0.0;
    for j in 1..times.steps() {
        let f = problem.source().at(times.time(j), problem.grid(), d)?;
        let (um, u, up) = (traj.value(j - 1), traj.value(j), traj.value(j + 1));
        let mut res = Vec::with_capacity(u.values().len());
        let mut lin = Vec::with_capacity(u.values().len());
        for (p, &s) in shifts.iter().enumerate() {
            let au = op.apply_spectral(s, |mu| mu, u.fiber(p));
            for c in 0..d {
                let acc = (up.fiber(p)[c] - u.fiber(p)[c] * 2.0 + um.fiber(p)[c]) / (dt * dt);
                res.push(acc + au[c] - f.fiber(p)[c]);
                lin.push(au[c]);
            }
        }
        pde_residual = pde_residual.max(l2(&res, dv));
        pde_scale = pde_scale.max(l2(&lin, dv) + f.l2_norm());
    }

    let phi = forward_transform(problem.phi())?;
    let psi = forward_transform(problem.psi())?;
    let mut ru = traj.value(0).axpy(Complex64::new(-1.0, 0.0), &phi)?;
    let mut rut = traj.rate(0).axpy(Complex64::new(-1.0, 0.0), &psi)?;
    let mut scale_u = traj.value(0).l2_norm() + phi.l2_norm();
    let mut scale_ut = traj.rate(0).l2_norm() + psi.l2_norm();
    for ((a, b), &l) in spec.alphas().iter().zip(spec.betas()).zip(spec.lambdas()) {
        let (u, ut) = evaluate_at(traj, problem, l)?;
        ru = ru.axpy(-a, &u)?;
        rut = rut.axpy(-b, &ut)?;
        scale_u += a.norm() * u.l2_norm();
        scale_ut += b.norm() * ut.l2_norm();
    }
    let rel = |r: f64, s: f64| if r == 0.0 { 0.0 } else { r / s };

    let energy_drift = problem.source().is_zero().then(|| {
        let e = energy(traj, op);
        let e0 = e[0];
        if e0 == 0.0 {
            0.0
        } else {
            e.iter().map(|v| (v - e0).abs()).fold(0.0, f64::max) / e0
        }
    });
    Ok(ResidualReport {
        pde_residual,
        pde_scale,
        condition_u: rel(ru.l2_norm(), scale_u),
        condition_ut: rel(rut.l2_norm(), scale_ut),
        energy_drift,
        dt,
    })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::multipoint::{solve_linear, SolverOptions, Source};
    use crate::spectral::{Field, GridSpec, TimeGrid};

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    fn bump(grid: &GridSpec, d: usize, shift: f64) -> Field {
        Field::from_fn(grid, d, |x| {
            let r2: f64 = x.iter().map(|v| (v - 3.0 - shift).powi(2)).sum();
            (0..d).map(|k| c((1.0 + k as f64) * (-r2).exp())).collect()
        })
        .unwrap()
    }

    #[test]
    fn zero_problem_has_zero_residuals() {
        let grid = GridSpec::cube(2, 8, 6.0).unwrap();
        let op = OperatorSpec::scalar(1.0).unwrap();
        let z = Field::zeros(&grid, 1);
        let problem = LinearProblem::homogeneous(op, z.clone(), z, 1.0).unwrap();
        let spec = MultipointSpec::real(&[0.2], &[0.3], &[0.55]).unwrap();
        let tg = TimeGrid::covering(1.0, 0.1).unwrap();
        let sol = solve_linear(&problem, &spec, &tg, &SolverOptions::default()).unwrap();
        let r = verify_solution(&sol.trajectory, &problem, &spec).unwrap();
        assert_eq!((r.pde_residual, r.condition_u, r.condition_ut, r.energy_drift), (0.0, 0.0, 0.0, Some(0.0)));
    }

    fn forced_problem() -> (LinearProblem, MultipointSpec) {
        let grid = GridSpec::cube(2, 16, 6.0).unwrap();
        let op = OperatorSpec::diagonal(&[1.0, 2.0]).unwrap();
        let tg = TimeGrid::covering(1.0, 0.01).unwrap();
        let fs: Vec<Field> = tg.times().map(|t| bump(&grid, 2, 0.0).scaled(c((2.0 * t).sin()))).collect();
        let problem =
            LinearProblem::new(op, bump(&grid, 2, 0.5), bump(&grid, 2, -0.5), Source::sampled(tg, &fs).unwrap(), 1.0)
                .unwrap();
        let spec = MultipointSpec::real(&[0.2, -0.1], &[0.1, 0.3], &[0.37, 0.8]).unwrap();
        (problem, spec)
    }

    #[test]
    fn conditions_and_second_order_residual() {
        let (problem, spec) = forced_problem();
        let mut res = Vec::new();
        for dt in [0.02, 0.01] {
            let tg = TimeGrid::covering(1.0, dt).unwrap();
            let sol = solve_linear(&problem, &spec, &tg, &SolverOptions::default()).unwrap();
            let r = verify_solution(&sol.trajectory, &problem, &spec).unwrap();
            assert!(r.max_condition() < 1e-10, "{r:?}");
            assert!(r.energy_drift.is_none());
            res.push(r.pde_residual);
        }
        let order = (res[0] / res[1]).log2();
        assert!((order - 2.0).abs() < 0.3, "order {order}");
    }

    #[test]
    fn injected_noise_is_detected() {
        let (problem, spec) = forced_problem();
        let tg = TimeGrid::covering(1.0, 0.05).unwrap();
        let sol = solve_linear(&problem, &spec, &tg, &SolverOptions::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let scale = sol.trajectory.value(0).values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let noisy: Vec<SpectralField> = sol
            .trajectory
            .values()
            .iter()
            .map(|f| {
                let mut g = f.clone();
                for v in g.values_mut() {
                    *v += c(1e-3 * scale * rng.gen_range(-1.0..1.0));
                }
                g
            })
            .collect();
        let traj = SpectralTrajectory::new(tg, noisy, sol.trajectory.rates().to_vec()).unwrap();
        let r = verify_solution(&traj, &problem, &spec).unwrap();
        assert!(r.condition_u > 1e-4 && r.condition_u < 1e-2, "{r:?}");
    }

    #[test]
    fn energy_conserved_for_free_waves() {
        let grid = GridSpec::cube(2, 16, 6.0).unwrap();
        let op = OperatorSpec::diagonal(&[1.0, 3.0]).unwrap();
        let problem = LinearProblem::homogeneous(op, bump(&grid, 2, 0.0), bump(&grid, 2, 1.0), 1.0).unwrap();
        let tg = TimeGrid::covering(1.0, 0.05).unwrap();
        let spec = MultipointSpec::cauchy();
        let sol = solve_linear(&problem, &spec, &tg, &SolverOptions::default()).unwrap();
        let r = verify_solution(&sol.trajectory, &problem, &spec).unwrap();
        assert!(r.energy_drift.unwrap() < 1e-12);
    }
}
