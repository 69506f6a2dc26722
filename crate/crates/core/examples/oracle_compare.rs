//! The analytic solver against brute-force references: a shooting solve of
//! the conditions and an RK4 method-of-lines run.

use std::f64::consts::TAU;

use multiwave::multipoint::{solve_linear, LinearProblem, MultipointSpec, SolverOptions};
use multiwave::operator::OperatorSpec;
use multiwave::oracle::{
    compare, relative_difference, rk4_integrate, rk4_step_bound, shooting_multipoint, ShootingOptions,
};
use multiwave::scenario::{gaussian_data, gaussian_source, BumpSpec};
use multiwave::spectral::{inverse_transform, GridSpec, TimeGrid};
use nalgebra::DMatrix;

fn main() -> multiwave::Result<()> {
    let grid = GridSpec::cube(2, 16, TAU)?;
    let op = OperatorSpec::from_real(&DMatrix::from_row_slice(2, 2, &[1.5, 0.3, 0.3, 1.0]))?;
    let (phi, psi) = gaussian_data(&grid, 2, 5, &BumpSpec::new(2))?;
    let source = gaussian_source(&grid, 2, 6, &BumpSpec::new(2), TimeGrid::covering(0.5, 0.01)?)?;
    let problem = LinearProblem::new(op, phi, psi, source, 0.5)?;
    let spec = MultipointSpec::real(&[0.3], &[0.2], &[0.5])?;

    let dt = 1e-3;
    let sol = solve_linear(&problem, &spec, &TimeGrid::covering(0.5, dt)?, &SolverOptions::default())?;
    let shot = shooting_multipoint(&problem, &spec, &ShootingOptions::default())?;
    println!(
        "initial pair vs shooting   {:.2e} {:.2e}",
        relative_difference(&sol.u0, &shot.u0)?,
        relative_difference(&sol.u1, &shot.u1)?
    );
    println!("smallest singular value    {:.3e}", shot.min_singular);

    println!("RK4 step bound             {:.4}", rk4_step_bound(&problem));
    let rk = rk4_integrate(&problem, &inverse_transform(&sol.u0), &inverse_transform(&sol.u1), dt)?;
    let c = compare(&sol.trajectory, &rk, 2.0, 2.0)?;
    println!(
        "trajectory difference      sup {:.2e}, L2 {:.2e}, L2L2 {:.2e}, relative {:.2e}",
        c.sup, c.l2, c.mixed, c.relative_l2
    );
    Ok(())
}
