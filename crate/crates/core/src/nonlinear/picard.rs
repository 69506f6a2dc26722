use log::warn;
use num_complex::Complex64;

use super::Nonlinearity;
use crate::multipoint::{
    solve_linear, verify_solution, LinearProblem, MultipointSpec, ResidualReport, SolverOptions, Source,
};
use crate::spectral::{
    forward_transform, inverse_transform, mixed_norm, Field, SpectralField, SpectralTrajectory, TimeGrid,
};
use crate::strichartz::{default_pair, Exponent};
use crate::{Error, Result};

/// Starting iterate of the fixed-point loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialGuess {
    /// `u⁰ = S(0)`, the solution with `F = 0`.
    Linear,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardConfig {
    pub max_iter: usize,
    /// Absolute tolerance on successive differences in the `V`-norm.
    pub tol: f64,
    pub contraction_target: f64,
    /// Ball radius `M`; defaults to twice the `V`-norm of `S(0)` over the
    /// problem horizon.
    pub radius: Option<f64>,
    /// Hölder exponent `p`; computed from the pair when absent.
    pub holder: Option<f64>,
    /// `V`-norm exponents `(q, r)`; defaults to [`default_pair`].
    pub pair: Option<(Exponent, Exponent)>,
    /// Fixed window length, or the top of the window ladder.
    pub window: Option<f64>,
    pub dt: f64,
    pub initial_guess: InitialGuess,
    pub min_window: f64,
    pub solver: SolverOptions,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            max_iter: 50,
            tol: 1e-10,
            contraction_target: 0.5,
            radius: None,
            holder: None,
            pair: None,
            window: None,
            dt: 0.01,
            initial_guess: InitialGuess::Linear,
            min_window: 1e-6,
            solver: SolverOptions::default(),
        }
    }
}

impl PicardConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidNonlinearity(m));
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        if !(self.tol > 0.0) {
            return bad(format!("tolerance {} must be positive", self.tol));
        }
        if !(self.contraction_target > 0.0 && self.contraction_target < 1.0) {
            return bad(format!("contraction target {} must lie in (0, 1)", self.contraction_target));
        }
        if self.radius.is_some_and(|m| !(m > 0.0 && m.is_finite())) {
            return bad("radius M must be positive".into());
        }
        if self.holder.is_some_and(|p| !(p >= 1.0)) {
            return bad("Hölder exponent p must be >= 1".into());
        }
        if self.window.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
            return bad("window must be positive".into());
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("time step {} must be positive", self.dt));
        }
        Ok(())
    }
}

/// History of one fixed-point solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub iterations: usize,
    /// `‖u^{n+1} − u^n‖_V`
    pub differences: Vec<f64>,
    /// Successive difference ratios.
    pub ratios: Vec<f64>,
    pub window: f64,
    pub radius: f64,
    pub holder: Option<f64>,
    pub pair: (Exponent, Exponent),
    pub converged: bool,
    pub final_norm: f64,
    pub dt: f64,
}

impl ConvergenceReport {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearSolution {
    pub trajectory: SpectralTrajectory,
    pub report: ConvergenceReport,
}

/// Windows and per-window reports of a continued solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationResult {
    pub trajectory: SpectralTrajectory,
    pub windows: Vec<f64>,
    pub reports: Vec<ConvergenceReport>,
}

/// `p` from `1/p = 1/q̃′ − k/q` with `q̃ = q`, when `p ≥ 1`.
pub fn holder_exponent(q: Exponent, k: f64) -> Option<f64> {
    match q {
        Exponent::Infinite => Some(1.0),
        _ => {
            let q = q.to_f64();
            (q - k - 1.0 > 0.0).then(|| q / (q - k - 1.0))
        }
    }
}

/// Largest `T = horizon · 2^{−j}` with `T^{1/p} M^{k−1} ≤ target`.
///
/// A radius `M ≤ 1` leaves the window at `horizon`.
pub fn select_window(radius: f64, k: f64, p: f64, horizon: f64, target: f64) -> f64 {
    if radius <= 1.0 {
        return horizon;
    }
    let growth = radius.powf(k - 1.0);
    let mut t = horizon;
    for _ in 0..200 {
        if t.powf(1.0 / p) * growth <= target {
            break;
        }
        t *= 0.5;
    }
    if t < 1e-6 {
        warn!("contraction window {t:.3e} below 1e-6");
    }
    t
}

fn pair_for(dim: usize, config: &PicardConfig) -> Result<(Exponent, Exponent)> {
    match config.pair {
        Some(p) => Ok(p),
        None if dim == 1 => Ok((Exponent::Infinite, Exponent::int(2))),
        None => default_pair(dim as u32),
    }
}

fn v_norm(samples: &[Field], dt: f64, pair: (Exponent, Exponent)) -> Result<f64> {
    mixed_norm(samples, dt, pair.0.to_f64(), pair.1.to_f64())
}

fn v_distance(a: &[Field], b: &[Field], dt: f64, pair: (Exponent, Exponent)) -> Result<f64> {
    let diff = a.iter().zip(b).map(|(x, y)| x.axpy(Complex64::new(-1.0, 0.0), y)).collect::<Result<Vec<_>>>()?;
    v_norm(&diff, dt, pair)
}

/// `F(u(t_j))` plus the external forcing, as a sampled source.
pub fn nonlinear_source(
    samples: &[Field],
    times: TimeGrid,
    nl: &Nonlinearity,
    external: &Source,
    offset: f64,
) -> Result<Source> {
    let spectral = samples
        .iter()
        .enumerate()
        .map(|(j, u)| {
            let f = forward_transform(&nl.eval(u)?)?;
            if external.is_zero() {
                Ok(f)
            } else {
                f.axpy(Complex64::new(1.0, 0.0), &external.at(offset + times.time(j), u.grid(), u.hdim())?)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Source::spectral(times, spectral)
}

/// One application `S(u) = S₁φ + S₂ψ + G(F(u))`: a linear multipoint solve
/// forced by `F(u)` on the time grid of `u`.
pub fn picard_map(
    u: &SpectralTrajectory,
    problem: &LinearProblem,
    spec: &MultipointSpec,
    nl: &Nonlinearity,
    options: &SolverOptions,
) -> Result<SpectralTrajectory> {
    let times = *u.times();
    let window = problem.with_horizon(times.horizon())?;
    let src = nonlinear_source(&u.physical_values(), times, nl, problem.source(), 0.0)?;
    Ok(solve_linear(&window.with_source(src)?, spec, &times, options)?.trajectory)
}

fn zero_trajectory(problem: &LinearProblem, times: TimeGrid) -> Result<SpectralTrajectory> {
    let z = SpectralField::zeros(problem.grid(), problem.hdim());
    SpectralTrajectory::new(times, vec![z.clone(); times.len()], vec![z; times.len()])
}

struct Window {
    radius: f64,
    holder: Option<f64>,
    pair: (Exponent, Exponent),
}

/// Fixed-point loop on one window; `problem` already has the window's
/// horizon and data, `offset` places its forcing in absolute time.
fn iterate(
    problem: &LinearProblem,
    spec: &MultipointSpec,
    nl: &Nonlinearity,
    config: &PicardConfig,
    times: TimeGrid,
    w: &Window,
    offset: f64,
) -> Result<NonlinearSolution> {
    let dt = times.dt();
    let shift_external = |problem: &LinearProblem| -> Result<LinearProblem> {
        if problem.source().is_zero() || offset == 0.0 {
            return Ok(problem.clone());
        }
        let grid = problem.grid();
        let samples =
            times.times().map(|t| problem.source().at(offset + t, grid, problem.hdim())).collect::<Result<Vec<_>>>()?;
        problem.with_source(Source::spectral(times, samples)?)
    };
    let local = shift_external(problem)?;
    let external = problem.source();
    let mut report = ConvergenceReport {
        iterations: 0,
        differences: Vec::new(),
        ratios: Vec::new(),
        window: times.horizon(),
        radius: w.radius,
        holder: w.holder,
        pair: w.pair,
        converged: false,
        final_norm: 0.0,
        dt,
    };
    if nl.is_linear() {
        let trajectory = solve_linear(&local, spec, &times, &config.solver)?.trajectory;
        report.iterations = 1;
        report.converged = true;
        report.final_norm = v_norm(&trajectory.physical_values(), dt, w.pair)?;
        return Ok(NonlinearSolution { trajectory, report });
    }

    let mut u = match config.initial_guess {
        InitialGuess::Linear => solve_linear(&local, spec, &times, &config.solver)?.trajectory,
        InitialGuess::Zero => zero_trajectory(problem, times)?,
    };
    let mut phys = u.physical_values();
    for it in 1..=config.max_iter {
        let src = nonlinear_source(&phys, times, nl, external, offset)?;
        let next = solve_linear(&local.with_source(src)?, spec, &times, &config.solver)?.trajectory;
        let next_phys = next.physical_values();
        let diff = v_distance(&next_phys, &phys, dt, w.pair)?;
        let norm = v_norm(&next_phys, dt, w.pair)?;
        if let Some(&prev) = report.differences.last() {
            if prev > 0.0 {
                report.ratios.push(diff / prev);
            }
        }
        report.differences.push(diff);
        report.iterations = it;
        report.final_norm = norm;
        if !(norm <= 2.0 * w.radius) {
            return Err(Error::Diverged { norm, bound: 2.0 * w.radius });
        }
        u = next;
        phys = next_phys;
        if diff <= config.tol {
            report.converged = true;
            return Ok(NonlinearSolution { trajectory: u, report });
        }
    }
    Err(Error::NotConverged {
        iterations: report.iterations,
        last: report.differences.last().copied().unwrap_or(f64::NAN),
    })
}

fn default_radius(
    problem: &LinearProblem,
    spec: &MultipointSpec,
    config: &PicardConfig,
    pair: (Exponent, Exponent),
) -> Result<f64> {
    if let Some(m) = config.radius {
        return Ok(m);
    }
    let times = grid_for(problem.horizon(), config.dt)?;
    let lin = solve_linear(problem, spec, &times, &config.solver)?.trajectory;
    Ok((2.0 * v_norm(&lin.physical_values(), times.dt(), pair)?).max(f64::MIN_POSITIVE))
}

/// Uniform grid on `[0, t]` with step as close to `dt` as divides `t`.
fn grid_for(t: f64, dt: f64) -> Result<TimeGrid> {
    let steps = ((t / dt).round() as usize).max(1);
    TimeGrid::new(t / steps as f64, steps)
}

/// Picard iteration `u^{n+1} = S(u^n)` on a window chosen so that
/// `T^{1/p} M^{k−1} ≤ ½`, until successive `V`-differences drop below
/// `tol`.
///
/// The window is `config.window` when set; otherwise it is selected from the
/// problem horizon, or equals the horizon when no Hölder exponent exists.
/// Every `λ_k` must lie inside the window.
pub fn solve_nonlinear(
    problem: &LinearProblem,
    spec: &MultipointSpec,
    nl: &Nonlinearity,
    config: &PicardConfig,
) -> Result<NonlinearSolution> {
    config.validate()?;
    let pair = pair_for(problem.grid().dim(), config)?;
    let holder = config.holder.or_else(|| holder_exponent(pair.0, nl.k()));
    let radius = default_radius(problem, spec, config, pair)?;
    let window = match (config.window, holder) {
        (Some(t), _) => t.min(problem.horizon()),
        (None, Some(p)) if !nl.is_linear() => {
            select_window(radius, nl.k(), p, problem.horizon(), config.contraction_target)
        }
        (None, Some(_)) => problem.horizon(),
        (None, None) => {
            warn!("no Hölder exponent p >= 1 for this pair and power; using the full horizon");
            problem.horizon()
        }
    };
    if spec.max_lambda() > window * (1.0 + 1e-12) {
        return Err(Error::InvalidMultipoint(format!(
            "lambda = {} lies beyond the contraction window T = {window}",
            spec.max_lambda()
        )));
    }
    let times = grid_for(window, config.dt)?;
    let local = problem.with_horizon(window)?;
    iterate(&local, spec, nl, config, times, &Window { radius, holder, pair }, 0.0)
}

/// Chains windows to cover `[0, t_star]`, restarting from the Cauchy data at
/// the end of each window.
///
/// The radius of window `j > 0` is `max(M, 2‖u(t_j)‖_{L^r})`; the window is
/// reselected from the ladder topped by `config.window` (or the problem
/// horizon). Multipoint conditions apply to the first window only. A window
/// shorter than `max(min_window, dt)` aborts with
/// [`Error::BlowUpSuspected`] carrying the partial trajectory.
pub fn continue_solution(
    problem: &LinearProblem,
    spec: &MultipointSpec,
    nl: &Nonlinearity,
    config: &PicardConfig,
    t_star: f64,
) -> Result<ContinuationResult> {
    config.validate()?;
    let dt = config.dt;
    let total = crate::spectral::TimeGrid::covering(t_star, dt)?.steps();
    if problem.source().horizon() < t_star * (1.0 - 1e-9) {
        return Err(Error::TimeOutOfRange { t: t_star, end: problem.source().horizon() });
    }
    let pair = pair_for(problem.grid().dim(), config)?;
    let holder = config.holder.or_else(|| holder_exponent(pair.0, nl.k()));
    let top = config.window.unwrap_or(problem.horizon());
    let base_problem = problem.with_horizon(problem.horizon().min(t_star))?;
    let radius0 = default_radius(&base_problem, spec, config, pair)?;

    let mut done = 0usize;
    let mut windows = Vec::new();
    let mut reports = Vec::new();
    let mut trajectory: Option<SpectralTrajectory> = None;
    while done < total {
        let t = done as f64 * dt;
        let radius = match &trajectory {
            None => radius0,
            Some(tr) => {
                let last = inverse_transform(tr.value(tr.len() - 1));
                radius0.max(2.0 * crate::spectral::lebesgue_norm(&last, pair.1.to_f64())?)
            }
        };
        let window = match holder {
            Some(p) if !nl.is_linear() => select_window(radius, nl.k(), p, top, config.contraction_target),
            _ => top,
        };
        let steps = (window / dt + 1e-9).floor() as usize;
        if window < config.min_window.max(dt) || steps == 0 {
            return Err(Error::BlowUpSuspected { time: t, window, windows, partial: trajectory.map(Box::new) });
        }
        let steps = steps.min(total - done);
        let times = TimeGrid::new(dt, steps)?;
        let (phi, psi, local_spec) = match &trajectory {
            None => (problem.phi().clone(), problem.psi().clone(), spec.clone()),
            Some(tr) => (
                inverse_transform(tr.value(tr.len() - 1)),
                inverse_transform(tr.rate(tr.len() - 1)),
                MultipointSpec::cauchy(),
            ),
        };
        if local_spec.max_lambda() > times.horizon() * (1.0 + 1e-12) {
            return Err(Error::InvalidMultipoint(format!(
                "lambda = {} lies beyond the first window T = {}",
                local_spec.max_lambda(),
                times.horizon()
            )));
        }
        let external_end = problem.source().horizon();
        let local = LinearProblem::new(
            problem.operator().clone(),
            phi,
            psi,
            problem.source().clone(),
            times.horizon().min(external_end),
        )?;
        let sol = iterate(&local, &local_spec, nl, config, times, &Window { radius, holder, pair }, t)?;
        windows.push(times.horizon());
        reports.push(sol.report);
        match &mut trajectory {
            None => trajectory = Some(sol.trajectory),
            Some(tr) => tr.append(sol.trajectory)?,
        }
        done += steps;
    }
    Ok(ContinuationResult { trajectory: trajectory.expect("at least one window"), windows, reports })
}

/// [`verify_solution`] with the forcing `F(u)` rebuilt from the trajectory.
pub fn verify_nonlinear(
    traj: &SpectralTrajectory,
    problem: &LinearProblem,
    spec: &MultipointSpec,
    nl: &Nonlinearity,
) -> Result<ResidualReport> {
    let times = *traj.times();
    let src = nonlinear_source(&traj.physical_values(), times, nl, problem.source(), 0.0)?;
    let local = problem.with_horizon(times.horizon())?.with_source(src)?;
    verify_solution(traj, &local, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::OperatorSpec;
    use crate::spectral::GridSpec;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    fn bump(grid: &GridSpec, amp: f64, x0: f64) -> Field {
        Field::from_fn(grid, 1, |x| {
            let r2: f64 = x.iter().map(|v| (v - x0).powi(2)).sum();
            vec![c(amp * (-r2).exp())]
        })
        .unwrap()
    }

    fn problem(amp: f64) -> LinearProblem {
        let grid = GridSpec::cube(2, 16, 8.0).unwrap();
        let op = OperatorSpec::scalar(1.0).unwrap();
        LinearProblem::homogeneous(op, bump(&grid, amp, 4.0), bump(&grid, 0.5 * amp, 3.5), 1.0).unwrap()
    }

    #[test]
    fn holder_and_windows() {
        assert_eq!(holder_exponent(Exponent::int(6), 3.0), Some(3.0));
        assert_eq!(holder_exponent(Exponent::int(4), 3.0), None);
        assert_eq!(select_window(2.0, 3.0, 1.0, 1.0, 0.5), 0.125);
        assert_eq!(select_window(4.0, 3.0, 1.0, 1.0, 0.5), 0.125 / 4.0);
        assert_eq!(select_window(0.9, 3.0, 1.0, 1.0, 0.5), 1.0);
    }

    #[test]
    fn linear_case_is_one_solve() {
        let p = problem(1.0);
        let nl = Nonlinearity::scalar_power(0.0, 3.0).unwrap();
        let spec = MultipointSpec::real(&[0.2], &[0.1], &[0.3]).unwrap();
        let config = PicardConfig { window: Some(0.5), dt: 0.05, ..Default::default() };
        let sol = solve_nonlinear(&p, &spec, &nl, &config).unwrap();
        assert_eq!(sol.report.iterations, 1);
        let lin = solve_linear(
            &p.with_horizon(0.5).unwrap(),
            &spec,
            &sol.trajectory.times().clone(),
            &SolverOptions::default(),
        )
        .unwrap();
        assert_eq!(lin.trajectory, sol.trajectory);
    }

    #[test]
    fn picard_map_of_zero_is_linear_solution() {
        let p = problem(1.0).with_horizon(0.5).unwrap();
        let nl = Nonlinearity::scalar_power(1.0, 3.0).unwrap();
        let spec = MultipointSpec::real(&[0.2], &[0.1], &[0.3]).unwrap();
        let times = TimeGrid::covering(0.5, 0.05).unwrap();
        let z = zero_trajectory(&p, times).unwrap();
        let image = picard_map(&z, &p, &spec, &nl, &SolverOptions::default()).unwrap();
        let lin = solve_linear(&p, &spec, &times, &SolverOptions::default()).unwrap();
        assert_eq!(image, lin.trajectory);
    }

    #[test]
    fn small_cubic_converges_and_guesses_agree() {
        let p = problem(0.5);
        let nl = Nonlinearity::scalar_power(0.3, 3.0).unwrap();
        let spec = MultipointSpec::real(&[0.1], &[0.2], &[0.2]).unwrap();
        let config = PicardConfig { dt: 0.02, ..Default::default() };
        let a = solve_nonlinear(&p, &spec, &nl, &config).unwrap();
        assert!(a.report.converged && a.report.iterations <= 20, "{:?}", a.report);
        assert!(a.report.max_ratio() <= 0.55);
        let b = solve_nonlinear(&p, &spec, &nl, &PicardConfig { initial_guess: InitialGuess::Zero, ..config }).unwrap();
        for (x, y) in a.trajectory.values().iter().zip(b.trajectory.values()) {
            let d = x.values().iter().zip(y.values()).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
            assert!(d < 1e-8);
        }
        let r = verify_nonlinear(&a.trajectory, &p, &spec, &nl).unwrap();
        assert!(r.max_condition() < 1e-7, "{r:?}");
    }

    #[test]
    fn linear_continuation_matches_single_solve() {
        let p = problem(1.0).with_horizon(0.6).unwrap();
        let nl = Nonlinearity::scalar_power(0.0, 3.0).unwrap();
        let config = PicardConfig { window: Some(0.2), dt: 0.05, ..Default::default() };
        let cont = continue_solution(&p, &MultipointSpec::cauchy(), &nl, &config, 0.6).unwrap();
        assert_eq!(cont.windows.len(), 3);
        let times = TimeGrid::covering(0.6, 0.05).unwrap();
        let lin = solve_linear(&p, &MultipointSpec::cauchy(), &times, &SolverOptions::default()).unwrap();
        for (x, y) in cont.trajectory.values().iter().zip(lin.trajectory.values()) {
            let d = x.values().iter().zip(y.values()).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
            assert!(d < 1e-10);
        }
    }

    #[test]
    fn rejects_lambda_beyond_window() {
        let p = problem(1.0);
        let nl = Nonlinearity::scalar_power(0.1, 3.0).unwrap();
        let spec = MultipointSpec::real(&[0.1], &[0.1], &[0.9]).unwrap();
        let config = PicardConfig { window: Some(0.5), dt: 0.05, ..Default::default() };
        assert!(matches!(solve_nonlinear(&p, &spec, &nl, &config), Err(Error::InvalidMultipoint(_))));
    }
}
