use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::multipoint::{LinearProblem, Source};
use crate::operator::OperatorSpec;
use crate::spectral::{forward_transform, steps_for, Field, SpectralField, SpectralTrajectory, TimeGrid};
use crate::{Error, Result};

/// Piecewise-linear forcing of a group of modes, one column per mode.
pub(crate) struct ModeForcing {
    dt: f64,
    samples: Vec<DMatrix<Complex64>>,
}

impl ModeForcing {
    pub(crate) fn group(source: &Source, indices: &[usize]) -> Option<Self> {
        match source {
            Source::Zero => None,
            Source::Sampled { times, samples } => Some(Self {
                dt: times.dt(),
                samples: samples
                    .iter()
                    .map(|s| {
                        let d = s.hdim();
                        DMatrix::from_iterator(
                            d,
                            indices.len(),
                            indices.iter().flat_map(|&p| s.fiber(p).iter().copied()),
                        )
                    })
                    .collect(),
            }),
        }
    }

    /// Interior grid times of the source below `end`.
    pub(crate) fn kinks(&self, end: f64) -> impl Iterator<Item = f64> + '_ {
        (1..self.samples.len() - 1).map(move |j| j as f64 * self.dt).take_while(move |&t| t < end)
    }

    pub(crate) fn at(&self, t: f64) -> DMatrix<Complex64> {
        let last = self.samples.len() - 1;
        let x = (t / self.dt).clamp(0.0, last as f64);
        let j = (x.floor() as usize).min(last - 1);
        let s = x - j as f64;
        &self.samples[j] * Complex64::new(1.0 - s, 0.0) + &self.samples[j + 1] * Complex64::new(s, 0.0)
    }
}

/// `A + shift·I`.
pub(crate) fn shifted_matrix(op: &OperatorSpec, shift: f64) -> DMatrix<Complex64> {
    let d = op.hdim();
    op.matrix() + DMatrix::<Complex64>::identity(d, d) * Complex64::new(shift, 0.0)
}

/// One classical RK4 step of `(U, V)′ = (V, −A_ξ U + G)` for a block of
/// columns; the forcing columns enter from the given offset on.
pub(crate) fn rk4_step(
    a: &DMatrix<Complex64>,
    u: &mut DMatrix<Complex64>,
    v: &mut DMatrix<Complex64>,
    t: f64,
    h: f64,
    forcing: Option<(&ModeForcing, usize)>,
) {
    let rhs = |uu: &DMatrix<Complex64>, vv: &DMatrix<Complex64>, tt: f64| {
        let mut acc = -(a * uu);
        if let Some((f, col)) = forcing {
            let g = f.at(tt);
            let mut c = acc.columns_mut(col, g.ncols());
            c += g;
        }
        (vv.clone(), acc)
    };
    let hc = |x: f64| Complex64::new(x, 0.0);
    let (k1u, k1v) = rhs(u, v, t);
    let (k2u, k2v) = rhs(&(&*u + &k1u * hc(h / 2.0)), &(&*v + &k1v * hc(h / 2.0)), t + h / 2.0);
    let (k3u, k3v) = rhs(&(&*u + &k2u * hc(h / 2.0)), &(&*v + &k2v * hc(h / 2.0)), t + h / 2.0);
    let (k4u, k4v) = rhs(&(&*u + &k3u * hc(h)), &(&*v + &k3v * hc(h)), t + h);
    *u += (k1u + (k2u + k3u) * hc(2.0) + k4u) * hc(h / 6.0);
    *v += (k1v + (k2v + k3v) * hc(2.0) + k4v) * hc(h / 6.0);
}

/// Mode indices grouped by equal `|ξ|²`, in increasing order of the shift.
pub(crate) fn shift_groups(xi2: &[f64]) -> Vec<(f64, Vec<usize>)> {
    let mut map: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (p, s) in xi2.iter().enumerate() {
        map.entry(s.to_bits()).or_default().push(p);
    }
    map.into_iter().map(|(k, v)| (f64::from_bits(k), v)).collect()
}

/// Largest stable step `0.5 / √(max eigenvalue of A_ξ)` on the problem grid.
pub fn rk4_step_bound(problem: &LinearProblem) -> f64 {
    let top = problem.grid().xi_squared().into_iter().fold(0.0, f64::max);
    let lam = problem.operator().eigenvalues().iter().copied().fold(0.0, f64::max);
    0.5 / (lam + top).sqrt()
}

/// Method-of-lines RK4 integration of `u_tt − Δu + Au = F` from `(u0, u1)`
/// with fixed step `dt` dividing the horizon. Every step is a sample.
pub fn rk4_integrate(problem: &LinearProblem, u0: &Field, u1: &Field, dt: f64) -> Result<SpectralTrajectory> {
    if u0.grid() != problem.grid()
        || u1.grid() != problem.grid()
        || u0.hdim() != problem.hdim()
        || u1.hdim() != problem.hdim()
    {
        return Err(Error::ShapeMismatch("initial pair does not match the problem grid".into()));
    }
    let steps = steps_for(problem.horizon(), dt)?;
    let bound = rk4_step_bound(problem);
    if dt > bound {
        return Err(Error::UnstableStep { dt, bound });
    }
    let (g0, g1) = (forward_transform(u0)?, forward_transform(u1)?);
    let d = problem.hdim();
    let xi2 = problem.grid().xi_squared();
    let groups = shift_groups(&xi2);
    let mut per_mode: Vec<(Vec<Complex64>, Vec<Complex64>)> = vec![(Vec::new(), Vec::new()); xi2.len()];
    let solved: Vec<Vec<(usize, (Vec<Complex64>, Vec<Complex64>))>> = groups
        .par_iter()
        .map(|(s, idx)| {
            let a = shifted_matrix(problem.operator(), *s);
            let forcing = ModeForcing::group(problem.source(), idx);
            let c = idx.len();
            let mut u = DMatrix::from_iterator(d, c, idx.iter().flat_map(|&p| g0.fiber(p).iter().copied()));
            let mut v = DMatrix::from_iterator(d, c, idx.iter().flat_map(|&p| g1.fiber(p).iter().copied()));
            let mut out: Vec<(Vec<Complex64>, Vec<Complex64>)> =
                (0..c).map(|_| (Vec::with_capacity((steps + 1) * d), Vec::with_capacity((steps + 1) * d))).collect();
            let record =
                |out: &mut Vec<(Vec<Complex64>, Vec<Complex64>)>, u: &DMatrix<Complex64>, v: &DMatrix<Complex64>| {
                    for (i, o) in out.iter_mut().enumerate() {
                        o.0.extend(u.column(i).iter());
                        o.1.extend(v.column(i).iter());
                    }
                };
            record(&mut out, &u, &v);
            for j in 0..steps {
                rk4_step(&a, &mut u, &mut v, j as f64 * dt, dt, forcing.as_ref().map(|f| (f, 0)));
                record(&mut out, &u, &v);
            }
            idx.iter().copied().zip(out).collect()
        })
        .collect();
    for (p, m) in solved.into_iter().flatten() {
        per_mode[p] = m;
    }
    let gather = |pick: fn(&(Vec<Complex64>, Vec<Complex64>)) -> &Vec<Complex64>| -> Result<Vec<SpectralField>> {
        (0..=steps)
            .map(|j| {
                let values = per_mode.iter().flat_map(|m| pick(m)[j * d..(j + 1) * d].iter().copied()).collect();
                SpectralField::new(problem.grid().clone(), d, values)
            })
            .collect()
    };
    let values = gather(|m| &m.0)?;
    let rates = gather(|m| &m.1)?;
    SpectralTrajectory::new(TimeGrid::new(dt, steps)?, values, rates)
}
