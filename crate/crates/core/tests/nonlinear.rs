use std::f64::consts::TAU;

use multiwave::multipoint::{LinearProblem, MultipointSpec, Source};
use multiwave::nonlinear::{solve_nonlinear, Nonlinearity, PicardConfig};
use multiwave::operator::OperatorSpec;
use multiwave::scenario::{gaussian_data, BumpSpec};
use multiwave::spectral::{Field, GridSpec, SpectralTrajectory};
use multiwave::Complex64;

fn solve(phi: Field, psi: Field) -> SpectralTrajectory {
    let problem = LinearProblem::new(OperatorSpec::scalar(1.0).unwrap(), phi, psi, Source::Zero, 0.4).unwrap();
    let spec = MultipointSpec::real(&[0.2], &[0.3], &[0.2]).unwrap();
    let nl = Nonlinearity::scalar_power(0.5, 3.0).unwrap();
    let config = PicardConfig { dt: 0.02, tol: 1e-13, ..PicardConfig::default() };
    solve_nonlinear(&problem, &spec, &nl, &config).unwrap().trajectory
}

fn sup_difference(a: &SpectralTrajectory, b: &SpectralTrajectory) -> f64 {
    a.physical_values()
        .iter()
        .zip(b.physical_values())
        .flat_map(|(x, y)| x.values().iter().zip(y.values()).map(|(p, q)| (p - q).norm()).collect::<Vec<_>>())
        .fold(0.0, f64::max)
}

#[test]
fn response_to_data_is_linear_for_small_perturbations() {
    let grid = GridSpec::cube(2, 16, TAU).unwrap();
    let (phi, psi) = gaussian_data(&grid, 1, 21, &BumpSpec::new(2)).unwrap();
    let (dphi, _) = gaussian_data(&grid, 1, 22, &BumpSpec::new(2)).unwrap();
    let base = solve(phi.clone(), psi.clone());
    let constants: Vec<f64> = [1e-3, 1e-4, 1e-5]
        .iter()
        .map(|&delta| {
            let moved = phi.axpy(Complex64::new(delta, 0.0), &dphi).unwrap();
            sup_difference(&solve(moved, psi.clone()), &base) / delta
        })
        .collect();
    let (lo, hi) = constants.iter().fold((f64::INFINITY, 0.0f64), |(l, h), c| (l.min(*c), h.max(*c)));
    assert!(lo > 0.0 && hi / lo < 1.05, "{constants:?}");
}
