use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{classify_pair, Exponent, GapRelation};
use crate::multipoint::{solve_linear, LinearProblem, MultipointSpec, SolverOptions, Source};
use crate::operator::OperatorSpec;
use crate::spectral::{
    forward_transform, inverse_transform, mixed_norm, spectral_sobolev_norm, Field, SobolevSpec, SpectralField,
    SpectralTrajectory, TimeGrid,
};
use crate::{Error, Result};

/// Both sides of one Strichartz estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    /// `‖A^α u‖_{L^q L^r}`, `sup ‖A^α u‖_{L²}`, `sup ‖A^α ∂_t u‖_{Ẇ^{γ−1,2}}`
    pub lhs_terms: [f64; 3],
    /// `‖Aφ‖_{Ẇ^{γ,2}}`, `‖Aψ‖_{Ẇ^{γ−1,2}}`, `‖F‖_{L^{q̃′} L^{r̃′}}`
    pub rhs_terms: [f64; 3],
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub gap: GapRelation,
    pub dt: f64,
    pub points: Vec<usize>,
}

fn ratio_of(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Applies a constant matrix to every fiber.
fn apply_fiberwise(g: &SpectralField, m: &DMatrix<Complex64>) -> SpectralField {
    let d = g.hdim();
    let mut out = g.clone();
    out.values_mut().par_chunks_mut(d).for_each(|fiber| {
        let v = m * nalgebra::DVector::from_column_slice(fiber);
        fiber.copy_from_slice(v.as_slice());
    });
    out
}

/// Physical samples of a time series of spectra.
fn physical(samples: &[SpectralField], m: Option<&DMatrix<Complex64>>) -> Vec<Field> {
    samples
        .iter()
        .map(|g| match m {
            Some(m) => inverse_transform(&apply_fiberwise(g, m)),
            None => inverse_transform(g),
        })
        .collect()
}

fn source_norm(source: &Source, q: f64, r: f64) -> Result<f64> {
    match source {
        Source::Zero => Ok(0.0),
        Source::Sampled { times, samples } => mixed_norm(&physical(samples, None), times.dt(), q, r),
    }
}

/// Relative size below which a zero mode counts as vanishing.
const MEAN_TOL: f64 = 1e-12;

fn mean_vanishes(g: &SpectralField) -> bool {
    let scale = g.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    g.fiber(0).iter().all(|v| v.norm() <= MEAN_TOL * scale)
}

/// Data and source must have zero mean, so the solution does too.
fn check_zero_mean(problem: &LinearProblem, order: f64) -> Result<()> {
    let mut ok = mean_vanishes(&forward_transform(problem.phi())?) && mean_vanishes(&forward_transform(problem.psi())?);
    if let Source::Sampled { samples, .. } = problem.source() {
        ok &= samples.iter().all(mean_vanishes);
    }
    if ok {
        Ok(())
    } else {
        Err(Error::SingularMultiplier { order })
    }
}

/// Solves the linear problem on `times` and evaluates both sides of the
/// estimate fixed by `gap`.
///
/// Data and source need vanishing mean whenever `γ < 1`, since the
/// homogeneous norms of negative order are undefined otherwise.
pub fn strichartz_report(
    problem: &LinearProblem,
    spec: &MultipointSpec,
    gap: &GapRelation,
    times: &TimeGrid,
    options: &SolverOptions,
) -> Result<EstimateReport> {
    if gap.n as usize != problem.grid().dim() {
        return Err(Error::ShapeMismatch(format!(
            "estimate for n = {} on a {}-dimensional grid",
            gap.n,
            problem.grid().dim()
        )));
    }
    let op = problem.operator();
    let alpha = *gap.alpha.numer() as f64 / *gap.alpha.denom() as f64;
    let gamma = *gap.gamma.numer() as f64 / *gap.gamma.denom() as f64;
    let power = op.fractional_power(alpha)?;
    let sol = solve_linear(problem, spec, times, options)?;
    let traj = &sol.trajectory;

    let (q, r) = (gap.pair.0.to_f64(), gap.pair.1.to_f64());
    let values = physical(traj.values(), Some(&power));
    let mixed = mixed_norm(&values, times.dt(), q, r)?;
    let energy = traj
        .values()
        .iter()
        .map(|g| spectral_sobolev_norm(&apply_fiberwise(g, &power), SobolevSpec::homogeneous(0.0)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    if gamma < 1.0 {
        check_zero_mean(problem, gamma - 1.0)?;
    }
    let rate = traj
        .rates()
        .iter()
        .map(|g| {
            let mut h = apply_fiberwise(g, &power);
            if gamma < 1.0 {
                h.fiber_mut(0).fill(Complex64::new(0.0, 0.0));
            }
            spectral_sobolev_norm(&h, SobolevSpec::homogeneous(gamma - 1.0))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let a = op.matrix();
    let phi = apply_fiberwise(&forward_transform(problem.phi())?, a);
    let psi = apply_fiberwise(&forward_transform(problem.psi())?, a);
    let rhs_terms = [
        spectral_sobolev_norm(&phi, SobolevSpec::homogeneous(gamma))?,
        spectral_sobolev_norm(&psi, SobolevSpec::homogeneous(gamma - 1.0))?,
        source_norm(problem.source(), gap.dual.0.conjugate().to_f64(), gap.dual.1.conjugate().to_f64())?,
    ];
    let lhs_terms = [mixed, energy, rate];
    let lhs: f64 = lhs_terms.iter().sum();
    let rhs: f64 = rhs_terms.iter().sum();
    Ok(EstimateReport {
        lhs_terms,
        rhs_terms,
        lhs,
        rhs,
        ratio: ratio_of(lhs, rhs),
        gap: *gap,
        dt: times.dt(),
        points: problem.grid().points().to_vec(),
    })
}

/// The double Duhamel form and its normalized size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearReport {
    pub value: Complex64,
    /// `‖F‖_{L^{q′} L^{r′}}`
    pub f_norm: f64,
    /// `‖G‖_{L^{q′} L^{r′}}`
    pub g_norm: f64,
    /// `|T(F, G)| / (‖F‖ ‖G‖)`
    pub constant: f64,
}

/// `C(t) A^{α/2} F̂(t)` at every sample.
fn weighted(op: &OperatorSpec, alpha: f64, samples: &[SpectralField], dt: f64) -> Vec<SpectralField> {
    samples
        .par_iter()
        .enumerate()
        .map(|(j, g)| {
            let t = j as f64 * dt;
            let xi2 = g.grid().xi_squared();
            let mut out = g.clone();
            for (p, &s) in xi2.iter().enumerate() {
                let v =
                    op.apply_spectral(s, |mu| (mu - s).max(0.0).powf(alpha / 2.0) * (t * mu.sqrt()).cos(), g.fiber(p));
                out.fiber_mut(p).copy_from_slice(&v);
            }
            out
        })
        .collect()
}

fn inner(a: &SpectralField, b: &SpectralField) -> Complex64 {
    let dv = a.grid().cell_volume();
    a.values().iter().zip(b.values()).map(|(x, y)| x * y.conj()).sum::<Complex64>() * dv
}

/// `T(F, G) = ∫∫_{s<t} ⟨C(s) A^{α/2} F(s), C(t) A^{α/2} G(t)⟩ ds dt` with
/// the cosine family as the free propagator.
///
/// `F` and `G` are spectra on the same uniform time grid with step `dt`;
/// both time integrals use the trapezoid rule. The norms use the dual
/// exponents of `pair`.
pub fn bilinear_form(
    op: &OperatorSpec,
    alpha: f64,
    f: &[SpectralField],
    g: &[SpectralField],
    dt: f64,
    pair: (Exponent, Exponent),
) -> Result<BilinearReport> {
    if f.len() != g.len() || f.len() < 2 {
        return Err(Error::ShapeMismatch("bilinear form needs two series of equal length >= 2".into()));
    }
    for x in f.iter().chain(g) {
        f[0].ensure_same_shape(x)?;
        if x.hdim() != op.hdim() {
            return Err(Error::ShapeMismatch("series and operator dimensions differ".into()));
        }
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidExponent(format!("alpha = {alpha} must lie in [0, 1)")));
    }
    let wf = weighted(op, alpha, f, dt);
    let wg = weighted(op, alpha, g, dt);
    let half = Complex64::new(0.5 * dt, 0.0);
    let mut cumulative = SpectralField::zeros(f[0].grid(), f[0].hdim());
    let mut value = Complex64::new(0.0, 0.0);
    let last = f.len() - 1;
    for j in 0..=last {
        if j > 0 {
            cumulative = cumulative.axpy(half, &wf[j - 1])?.axpy(half, &wf[j])?;
        }
        let w = if j == 0 || j == last { 0.5 * dt } else { dt };
        value += inner(&cumulative, &wg[j]) * w;
    }
    let (q, r) = (pair.0.conjugate().to_f64(), pair.1.conjugate().to_f64());
    let f_norm = mixed_norm(&physical(f, None), dt, q, r)?;
    let g_norm = mixed_norm(&physical(g, None), dt, q, r)?;
    Ok(BilinearReport { value, f_norm, g_norm, constant: ratio_of(value.norm(), f_norm * g_norm) })
}

/// Candidate pairs `(∞, 2)`, `(4, 4)`, `(2, ∞)` that are admissible in
/// dimension `n`; `(2, ∞)` is always left out.
pub fn default_norm_pairs(n: u32) -> Vec<(Exponent, Exponent)> {
    [
        (Exponent::Infinite, Exponent::int(2)),
        (Exponent::int(4), Exponent::int(4)),
        (Exponent::int(2), Exponent::Infinite),
    ]
    .into_iter()
    .filter(|&(q, r)| !(q == Exponent::int(2) && r.is_infinite()))
    .filter(|&(q, r)| classify_pair(n, q, r).map(|v| v.admissible).unwrap_or(false))
    .collect()
}

/// `max` over `pairs` of `‖u‖_{L^q L^r}`; all pairs must be admissible.
pub fn strichartz_norm(traj: &SpectralTrajectory, pairs: &[(Exponent, Exponent)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::InvalidExponent("no exponent pairs given".into()));
    }
    let n = traj.grid().dim() as u32;
    for &(q, r) in pairs {
        if !classify_pair(n, q, r)?.admissible {
            return Err(Error::InvalidExponent(format!("pair ({q}, {r}) is not admissible for n = {n}")));
        }
    }
    let samples = traj.physical_values();
    let dt = traj.times().dt();
    pairs
        .iter()
        .map(|&(q, r)| mixed_norm(&samples, dt, q.to_f64(), r.to_f64()))
        .try_fold(0.0_f64, |m, v| v.map(|v| m.max(v)))
}
