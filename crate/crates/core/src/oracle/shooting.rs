use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::rk4::{rk4_step, shift_groups, shifted_matrix, ModeForcing};
use crate::multipoint::{LinearProblem, MultipointSpec};
use crate::spectral::{forward_transform, SpectralField};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingOptions {
    /// Largest RK4 step.
    pub max_step: f64,
    /// Maps with `σ_min / max(1, σ_max)` below this count as singular.
    pub singular_tol: f64,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self { max_step: 1e-3, singular_tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShootingResult {
    pub u0: SpectralField,
    pub u1: SpectralField,
    /// Smallest relative singular value over all assembled maps.
    pub min_singular: f64,
}

/// Step boundaries `0 = t_0 < … ` through every `λ_k` and source grid time.
fn breakpoints(lambdas: &[f64], forcing: Option<&ModeForcing>) -> Vec<f64> {
    let end = lambdas.iter().copied().fold(0.0, f64::max);
    let mut pts: Vec<f64> = lambdas.to_vec();
    pts.push(0.0);
    if let Some(f) = forcing {
        pts.extend(f.kinks(end));
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    pts
}

/// RK4 states `(U, V)` at each `λ_k` from initial columns `(u, v)`.
fn shoot(
    a: &DMatrix<Complex64>,
    mut u: DMatrix<Complex64>,
    mut v: DMatrix<Complex64>,
    lambdas: &[f64],
    forcing: Option<&ModeForcing>,
    max_step: f64,
) -> Vec<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    let pts = breakpoints(lambdas, forcing);
    let mut at = vec![None; lambdas.len()];
    for w in pts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let n = ((t1 - t0) / max_step).ceil().max(1.0) as usize;
        let h = (t1 - t0) / n as f64;
        for j in 0..n {
            rk4_step(a, &mut u, &mut v, t0 + j as f64 * h, h, forcing.map(|f| (f, 0)));
        }
        for (k, &l) in lambdas.iter().enumerate() {
            if (l - t1).abs() <= 1e-12 * t1.max(1.0) {
                at[k] = Some((u.clone(), v.clone()));
            }
        }
    }
    at.into_iter().map(|s| s.expect("every lambda is a breakpoint")).collect()
}

struct BasisMap {
    lu: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    relative_singular: f64,
}

/// `I − Σ diag(α_k, β_k) Φ(λ_k)` assembled from propagated basis columns.
fn basis_map(problem: &LinearProblem, spec: &MultipointSpec, shift: f64, max_step: f64) -> BasisMap {
    let d = problem.hdim();
    let a = shifted_matrix(problem.operator(), shift);
    let mut u = DMatrix::<Complex64>::zeros(d, 2 * d);
    let mut v = DMatrix::<Complex64>::zeros(d, 2 * d);
    for i in 0..d {
        u[(i, i)] = Complex64::new(1.0, 0.0);
        v[(i, d + i)] = Complex64::new(1.0, 0.0);
    }
    let states = if spec.count() == 0 { Vec::new() } else { shoot(&a, u, v, spec.lambdas(), None, max_step) };
    let mut m = DMatrix::<Complex64>::identity(2 * d, 2 * d);
    for (k, (uk, vk)) in states.iter().enumerate() {
        let mut top = m.rows_mut(0, d);
        top -= uk * spec.alphas()[k];
        let mut bottom = m.rows_mut(d, d);
        bottom -= vk * spec.betas()[k];
    }
    let sv = m.singular_values();
    let (smin, smax) = (sv.min(), sv.max());
    BasisMap { lu: m.lu(), relative_singular: smin / smax.max(1.0) }
}

/// Solves the multipoint conditions for `(û(0), ∂_t û(0))` by shooting:
/// per mode, RK4 propagation of basis initial data to every `λ_k` gives the
/// linear map of the conditions, solved by LU with partial pivoting.
///
/// The basis maps depend only on `|ξ|²` and are shared between modes.
pub fn shooting_multipoint(
    problem: &LinearProblem,
    spec: &MultipointSpec,
    options: &ShootingOptions,
) -> Result<ShootingResult> {
    if !(options.max_step.is_finite() && options.max_step > 0.0) {
        return Err(Error::InvalidTimeGrid(format!("step {} must be positive", options.max_step)));
    }
    spec.check_horizon(problem.horizon())?;
    let d = problem.hdim();
    let xi2 = problem.grid().xi_squared();
    let groups = shift_groups(&xi2);
    let phi = forward_transform(problem.phi())?;
    let psi = forward_transform(problem.psi())?;
    type Pair = (Vec<Complex64>, Vec<Complex64>);
    let per_group: Vec<(f64, Vec<(usize, Option<Pair>)>)> = groups
        .par_iter()
        .map(|(s, idx)| {
            let map = basis_map(problem, spec, *s, options.max_step);
            if map.relative_singular < options.singular_tol {
                return (map.relative_singular, idx.iter().map(|&p| (p, None)).collect());
            }
            let c = idx.len();
            let mut rhs = DMatrix::<Complex64>::zeros(2 * d, c);
            for (i, &p) in idx.iter().enumerate() {
                rhs.view_mut((0, i), (d, 1)).copy_from_slice(phi.fiber(p));
                rhs.view_mut((d, i), (d, 1)).copy_from_slice(psi.fiber(p));
            }
            if let Some(f) = ModeForcing::group(problem.source(), idx).filter(|_| spec.count() > 0) {
                let zero = DMatrix::<Complex64>::zeros(d, c);
                let a = shifted_matrix(problem.operator(), *s);
                let states = shoot(&a, zero.clone(), zero, spec.lambdas(), Some(&f), options.max_step);
                for (k, (uk, vk)) in states.iter().enumerate() {
                    let mut top = rhs.rows_mut(0, d);
                    top += uk * spec.alphas()[k];
                    let mut bottom = rhs.rows_mut(d, d);
                    bottom += vk * spec.betas()[k];
                }
            }
            let Some(x) = map.lu.solve(&rhs) else {
                return (map.relative_singular, idx.iter().map(|&p| (p, None)).collect());
            };
            let solved = idx
                .iter()
                .enumerate()
                .map(|(i, &p)| {
                    let col = x.column(i);
                    (p, Some((col.rows(0, d).iter().copied().collect(), col.rows(d, d).iter().copied().collect())))
                })
                .collect();
            (map.relative_singular, solved)
        })
        .collect();
    let min_singular = per_group.iter().map(|g| g.0).fold(f64::INFINITY, f64::min);
    let mut solved: Vec<Option<Pair>> = vec![None; xi2.len()];
    for (p, x) in per_group.into_iter().flat_map(|g| g.1) {
        solved[p] = x;
    }

    let singular: Vec<Vec<i64>> =
        solved.iter().enumerate().filter(|(_, s)| s.is_none()).map(|(p, _)| problem.grid().frequency(p)).collect();
    if !singular.is_empty() {
        return Err(Error::SingularModes { frequencies: singular });
    }
    let mut u0 = Vec::with_capacity(xi2.len() * d);
    let mut u1 = Vec::with_capacity(xi2.len() * d);
    for (a, b) in solved.into_iter().flatten() {
        u0.extend(a);
        u1.extend(b);
    }
    Ok(ShootingResult {
        u0: SpectralField::new(problem.grid().clone(), d, u0)?,
        u1: SpectralField::new(problem.grid().clone(), d, u1)?,
        min_singular,
    })
}
