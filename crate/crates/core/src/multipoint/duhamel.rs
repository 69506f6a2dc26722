use num_complex::Complex64;

use super::{MultipointSpec, SolverOptions};
use crate::operator::{OperatorSpec, ShiftedOperator};
use crate::{Error, Result};

const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9; // 1 / (2√3)

/// Samples `F̂(t_j, ξ)` of one mode on a uniform grid `t_j = j·dt`.
///
/// Between samples the source is linear. An empty sample list is the zero
/// source, defined for all times.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSource {
    dt: f64,
    hdim: usize,
    /// `samples[j * hdim + c]`
    samples: Vec<Complex64>,
}

impl ModeSource {
    pub fn zero(hdim: usize) -> Self {
        Self { dt: 1.0, hdim, samples: Vec::new() }
    }

    pub fn new(dt: f64, hdim: usize, samples: Vec<Complex64>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidTimeGrid(format!("source step {dt} must be positive")));
        }
        if hdim == 0 || samples.len() % hdim != 0 || samples.len() < 2 * hdim {
            return Err(Error::ShapeMismatch(format!(
                "{} source values do not form at least two samples of dimension {hdim}",
                samples.len()
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { location: "mode source".into() });
        }
        Ok(Self { dt, hdim, samples })
    }

    /// Samples `f(t_j)` for `j = 0..=steps`.
    pub fn from_fn(dt: f64, steps: usize, hdim: usize, f: impl Fn(f64) -> Vec<Complex64>) -> Result<Self> {
        let samples = (0..=steps).flat_map(|j| f(j as f64 * dt)).collect();
        Self::new(dt, hdim, samples)
    }

    pub fn is_zero(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn hdim(&self) -> usize {
        self.hdim
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        (self.samples.len() / self.hdim).saturating_sub(1)
    }

    /// Last covered time; infinite for the zero source.
    pub fn horizon(&self) -> f64 {
        if self.is_zero() {
            f64::INFINITY
        } else {
            self.steps() as f64 * self.dt
        }
    }

    pub fn sample(&self, j: usize) -> &[Complex64] {
        &self.samples[j * self.hdim..(j + 1) * self.hdim]
    }

    pub(crate) fn check_time(&self, t: f64) -> Result<()> {
        let end = self.horizon();
        if !(t >= 0.0 && t <= end + 1e-9 * end.max(1.0)) {
            return Err(Error::TimeOutOfRange { t, end });
        }
        Ok(())
    }

    /// Linear interpolation at `t`.
    pub fn at(&self, t: f64) -> Result<Vec<Complex64>> {
        self.check_time(t)?;
        if self.is_zero() {
            return Ok(vec![Complex64::new(0.0, 0.0); self.hdim]);
        }
        Ok(self.in_step(self.step_of(t), t))
    }

    fn step_of(&self, t: f64) -> usize {
        ((t / self.dt).floor().max(0.0) as usize).min(self.steps() - 1)
    }

    fn in_step(&self, j: usize, t: f64) -> Vec<Complex64> {
        let s = (t - j as f64 * self.dt) / self.dt;
        let (a, b) = (self.sample(j), self.sample(j + 1));
        a.iter().zip(b).map(|(a, b)| a + (b - a) * s).collect()
    }

    /// `(step, lo, hi)` pieces of `[a, b]` cut at sample times.
    fn pieces(&self, a: f64, b: f64) -> Vec<(usize, f64, f64)> {
        let mut out = Vec::new();
        if b <= a {
            return out;
        }
        let last = self.steps() - 1;
        let mut j = self.step_of(a);
        loop {
            let lo = a.max(j as f64 * self.dt);
            let hi = if j == last { b } else { b.min((j + 1) as f64 * self.dt) };
            if hi > lo {
                out.push((j, lo, hi));
            }
            if j == last || (j + 1) as f64 * self.dt >= b {
                break;
            }
            j += 1;
        }
        out
    }

    /// The source in eigen-coordinates of `op`, one series per eigenvalue.
    pub(crate) fn eigen(&self, op: &OperatorSpec) -> EigenSource {
        if self.is_zero() {
            return EigenSource { dt: self.dt, steps: 0, comps: Vec::new() };
        }
        let d = self.hdim;
        let n = self.steps() + 1;
        let mut comps = vec![vec![Complex64::new(0.0, 0.0); n]; d];
        for j in 0..n {
            let w = op.to_eigenbasis(self.sample(j));
            for (i, wi) in w.into_iter().enumerate() {
                comps[i][j] = wi;
            }
        }
        EigenSource { dt: self.dt, steps: self.steps(), comps }
    }
}

/// A [`ModeSource`] rotated into the eigenbasis of `A`.
#[derive(Debug, Clone)]
pub(crate) struct EigenSource {
    dt: f64,
    steps: usize,
    comps: Vec<Vec<Complex64>>,
}

impl EigenSource {
    pub(crate) fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub(crate) fn value(&self, i: usize, t: f64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let j = ((t / self.dt).floor().max(0.0) as usize).min(self.steps - 1);
        let s = (t - j as f64 * self.dt) / self.dt;
        let g = &self.comps[i];
        g[j] + (g[j + 1] - g[j]) * s
    }

    /// `(∫_a^b cos(ω(τ−o)) g_i dτ, ∫_a^b sin(ω(τ−o)) g_i dτ)`.
    pub(crate) fn moments(&self, i: usize, omega: f64, origin: f64, a: f64, b: f64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        if self.is_zero() || b <= a {
            return (zero, zero);
        }
        let g = &self.comps[i];
        let last = self.steps - 1;
        let (mut ic, mut is) = (zero, zero);
        let mut j = ((a / self.dt).floor().max(0.0) as usize).min(last);
        loop {
            let t0 = j as f64 * self.dt;
            let lo = a.max(t0);
            let hi = if j == last { b } else { b.min(t0 + self.dt) };
            if hi > lo {
                let half = 0.5 * (hi - lo);
                let mid = 0.5 * (hi + lo);
                for x in [mid - 2.0 * half * GAUSS_OFFSET, mid + 2.0 * half * GAUSS_OFFSET] {
                    let gv = g[j] + (g[j + 1] - g[j]) * ((x - t0) / self.dt);
                    let phase = omega * (x - origin);
                    ic += gv * (half * phase.cos());
                    is += gv * (half * phase.sin());
                }
            }
            if j == last || t0 + self.dt >= b {
                break;
            }
            j += 1;
        }
        (ic, is)
    }
}

fn gauss_sum(
    source: &ModeSource,
    t: f64,
    kernel: impl Fn(f64, &[Complex64]) -> Vec<Complex64>,
) -> Result<Vec<Complex64>> {
    source.check_time(t)?;
    let mut acc = vec![Complex64::new(0.0, 0.0); source.hdim()];
    if source.is_zero() {
        return Ok(acc);
    }
    for (j, lo, hi) in source.pieces(0.0, t) {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for x in [mid - 2.0 * half * GAUSS_OFFSET, mid + 2.0 * half * GAUSS_OFFSET] {
            let v = kernel(t - x, &source.in_step(j, x));
            for (a, v) in acc.iter_mut().zip(v) {
                *a += v * half;
            }
        }
    }
    Ok(acc)
}

/// `∫_0^t S(t−τ) F̂(τ) dτ` by two-point Gauss–Legendre on every source step.
pub fn duhamel_integral(shifted: &ShiftedOperator<'_>, source: &ModeSource, t: f64) -> Result<Vec<Complex64>> {
    gauss_sum(source, t, |s, f| shifted.apply_sine(s, f))
}

/// `∫_0^t C(t−τ) F̂(τ) dτ`, the Duhamel term of `∂_t û`.
pub fn duhamel_rate_integral(shifted: &ShiftedOperator<'_>, source: &ModeSource, t: f64) -> Result<Vec<Complex64>> {
    gauss_sum(source, t, |s, f| shifted.apply_cosine(s, f))
}

/// Eigen-coordinate state `(w0, w1)` advanced from `from` to `to`.
pub(crate) fn advance(
    freqs: &[f64],
    w0: &[Complex64],
    w1: &[Complex64],
    src: &EigenSource,
    from: f64,
    to: f64,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let h = to - from;
    let mut u = Vec::with_capacity(freqs.len());
    let mut ut = Vec::with_capacity(freqs.len());
    for (i, &w) in freqs.iter().enumerate() {
        let (c, s) = ((w * h).cos(), (w * h).sin());
        let (ic, is) = src.moments(i, w, from, from, to);
        u.push(w0[i] * c + w1[i] * (s / w) + (ic * s - is * c) / w);
        ut.push(-w0[i] * (w * s) + w1[i] * c + ic * c + is * s);
    }
    (u, ut)
}

/// Right-hand sides `(f1, f2)` of the mode system in eigen-coordinates.
pub(crate) fn eigen_rhs(
    spec: &MultipointSpec,
    freqs: &[f64],
    src: &EigenSource,
    phi: &[Complex64],
    psi: &[Complex64],
    options: &SolverOptions,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut f1 = phi.to_vec();
    let mut f2 = psi.to_vec();
    if src.is_zero() {
        return (f1, f2);
    }
    for ((a, b), &l) in spec.alphas().iter().zip(spec.betas()).zip(spec.lambdas()) {
        for (i, &w) in freqs.iter().enumerate() {
            let (c, s) = ((w * l).cos(), (w * l).sin());
            let (ic, is) = src.moments(i, w, 0.0, 0.0, l);
            let sine_term = (ic * s - is * c) / w;
            let cosine_term = ic * c + is * s;
            f1[i] += a * sine_term;
            f2[i] += b * if options.sine_rate_kernel { sine_term } else { cosine_term };
            if options.half_source_term {
                f2[i] += b * 0.5 * src.value(i, l);
            }
        }
    }
    (f1, f2)
}

/// `f1 = φ̂ + Σ α_k ∫_0^{λ_k} S(λ_k−τ)F̂ dτ` and
/// `f2 = ψ̂ + Σ β_k ∫_0^{λ_k} C(λ_k−τ)F̂ dτ`.
///
/// [`SolverOptions`] can swap the `f2` kernel for `S` and add `½ Σ β_k F̂(λ_k)`.
pub fn assemble_rhs(
    spec: &MultipointSpec,
    shifted: &ShiftedOperator<'_>,
    source: &ModeSource,
    phi_hat: &[Complex64],
    psi_hat: &[Complex64],
    options: &SolverOptions,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    source.check_time(spec.max_lambda())?;
    let op = shifted.base();
    let src = source.eigen(op);
    let (f1, f2) =
        eigen_rhs(spec, &shifted.frequencies(), &src, &op.to_eigenbasis(phi_hat), &op.to_eigenbasis(psi_hat), options);
    Ok((op.from_eigenbasis(&f1), op.from_eigenbasis(&f2)))
}

/// `û(t)` and `∂_t û(t)` at each requested time.
///
/// ```text
/// û(t)   = C(t)u0 + S(t)u1 + ∫_0^t S(t−τ)F̂ dτ
/// ∂_t û  = −A_ξ S(t)u0 + C(t)u1 + ∫_0^t C(t−τ)F̂ dτ
/// ```
///
/// `times` must be nondecreasing and nonnegative.
pub fn propagate(
    shifted: &ShiftedOperator<'_>,
    u0: &[Complex64],
    u1: &[Complex64],
    source: &ModeSource,
    times: &[f64],
) -> Result<Vec<(Vec<Complex64>, Vec<Complex64>)>> {
    if let Some(&t) = times.last() {
        source.check_time(t)?;
    }
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::InvalidTimeGrid("propagation times must be nondecreasing and >= 0".into()));
    }
    let op = shifted.base();
    let src = source.eigen(op);
    let freqs = shifted.frequencies();
    let w0 = op.to_eigenbasis(u0);
    let w1 = op.to_eigenbasis(u1);
    Ok(propagate_eigen(&freqs, &w0, &w1, &src, times)
        .into_iter()
        .map(|(u, ut)| (op.from_eigenbasis(&u), op.from_eigenbasis(&ut)))
        .collect())
}

/// Eigen-coordinate core of [`propagate`]: the homogeneous part in closed
/// form from `t = 0`, the Duhamel part from running moments.
pub(crate) fn propagate_eigen(
    freqs: &[f64],
    w0: &[Complex64],
    w1: &[Complex64],
    src: &EigenSource,
    times: &[f64],
) -> Vec<(Vec<Complex64>, Vec<Complex64>)> {
    let d = freqs.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut ic = vec![zero; d];
    let mut is = vec![zero; d];
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let mut u = Vec::with_capacity(d);
        let mut ut = Vec::with_capacity(d);
        for (i, &w) in freqs.iter().enumerate() {
            let (dc, ds) = src.moments(i, w, 0.0, prev, t);
            ic[i] += dc;
            is[i] += ds;
            let (c, s) = ((w * t).cos(), (w * t).sin());
            u.push(w0[i] * c + w1[i] * (s / w) + (ic[i] * s - is[i] * c) / w);
            ut.push(-w0[i] * (w * s) + w1[i] * c + ic[i] * c + is[i] * s);
        }
        prev = t;
        out.push((u, ut));
    }
    out
}
