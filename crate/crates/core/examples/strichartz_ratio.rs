//! Both sides of a Strichartz estimate for a forced two-point problem, and
//! how the ratio reacts to refinement.

use std::f64::consts::PI;

use multiwave::multipoint::{LinearProblem, MultipointSpec, SolverOptions};
use multiwave::operator::OperatorSpec;
use multiwave::scenario::{gaussian_data, gaussian_source, BumpSpec};
use multiwave::spectral::{GridSpec, TimeGrid};
use multiwave::strichartz::{strichartz_report, Exponent, GapRelation, Rational};

fn main() -> multiwave::Result<()> {
    let gap = GapRelation::symmetric(2, (Exponent::int(6), Exponent::int(6)), Rational::new(1, 2))?;
    println!("gamma = {}, pair ({}, {})", gap.gamma, gap.pair.0, gap.pair.1);
    let spec = MultipointSpec::real(&[0.2], &[0.1], &[0.5])?;
    let bumps = BumpSpec { zero_mean: true, ..BumpSpec::new(2) };
    for (points, dt) in [(32, 0.05), (64, 0.05), (32, 0.025)] {
        let grid = GridSpec::cube(2, points, 4.0 * PI)?;
        let (phi, psi) = gaussian_data(&grid, 1, 100, &bumps)?;
        let source = gaussian_source(&grid, 1, 200, &bumps, TimeGrid::covering(1.0, 0.05)?)?;
        let problem = LinearProblem::new(OperatorSpec::scalar(1.0)?, phi, psi, source, 1.0)?;
        let rep = strichartz_report(&problem, &spec, &gap, &TimeGrid::covering(1.0, dt)?, &SolverOptions::default())?;
        println!(
            "{points:>3}² dt {dt:<5}  lhs {:.6}  rhs {:.6}  ratio {:.6}  terms {:.3?} / {:.3?}",
            rep.lhs, rep.rhs, rep.ratio, rep.lhs_terms, rep.rhs_terms
        );
    }
    Ok(())
}
