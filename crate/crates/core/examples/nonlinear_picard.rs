//! Cubic wave equation with a two-point condition, by Picard iteration on a
//! contraction window, then continued window by window.

use std::f64::consts::TAU;

use multiwave::multipoint::{LinearProblem, MultipointSpec, Source};
use multiwave::nonlinear::{
    continue_solution, solve_nonlinear, theorem_constants, verify_nonlinear, Nonlinearity, PicardConfig,
};
use multiwave::operator::OperatorSpec;
use multiwave::scenario::{gaussian_data, BumpSpec};
use multiwave::spectral::GridSpec;

fn main() -> multiwave::Result<()> {
    let grid = GridSpec::cube(2, 32, TAU)?;
    let (phi, psi) = gaussian_data(&grid, 1, 11, &BumpSpec { amplitude: 0.5, ..BumpSpec::new(3) })?;
    let problem = LinearProblem::new(OperatorSpec::scalar(1.0)?, phi, psi, Source::Zero, 0.5)?;
    let spec = MultipointSpec::real(&[0.2], &[0.3], &[0.25])?;
    let nl = Nonlinearity::scalar_power(0.1, 3.0)?;
    let config = PicardConfig { dt: 0.01, ..PicardConfig::default() };

    let sol = solve_nonlinear(&problem, &spec, &nl, &config)?;
    let r = &sol.report;
    println!("window {:.3}, radius {:.3}, {} iterations", r.window, r.radius, r.iterations);
    for (i, d) in r.differences.iter().enumerate() {
        println!("  |u{} - u{}|_V = {d:.3e}", i + 1, i);
    }
    let res = verify_nonlinear(&sol.trajectory, &problem, &spec, &nl)?;
    println!("conditions {:.2e}, PDE residual {:.2e}", res.max_condition(), res.relative_pde());

    let cauchy = LinearProblem::new(
        problem.operator().clone(),
        problem.phi().clone(),
        problem.psi().clone(),
        Source::Zero,
        2.0,
    )?;
    let long = continue_solution(&cauchy, &MultipointSpec::cauchy(), &nl, &config, 2.0)?;
    println!("continued to t = {} over {} windows", long.trajectory.times().horizon(), long.windows.len());

    let c = theorem_constants(4)?;
    println!(
        "n = 4: gamma = {}, k0 = {}, q0 = {}, r0 = {} (admissible: {})",
        c.gamma, c.k0, c.q0, c.r0, !c.r0_inadmissible
    );
    Ok(())
}
