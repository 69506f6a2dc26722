use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::multipoint::Source;
use crate::spectral::snapshot::read_field;
use crate::spectral::{Field, GridSpec, TimeGrid};
use crate::{Error, Result};

/// Distance from a bump centre to the box wall, in widths, at which the
/// bump has fallen below `1e-14`.
const TAIL_WIDTHS: f64 = 8.1;

/// One isotropic Gaussian with a coefficient per component.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub center: Vec<f64>,
    pub width: f64,
    pub weights: Vec<f64>,
}

impl Bump {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().zip(&self.center).map(|(a, c)| (a - c).powi(2)).sum();
        (-r2 / (2.0 * self.width * self.width)).exp()
    }
}

/// Shape of seeded bump data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpSpec {
    pub count: usize,
    pub amplitude: f64,
    pub zero_mean: bool,
    /// Common width; drawn from `[0.03, 0.06]·L_min` per bump when absent.
    pub width: Option<f64>,
}

impl BumpSpec {
    pub fn new(count: usize) -> Self {
        Self { count, amplitude: 1.0, zero_mean: false, width: None }
    }
}

/// Random bumps with centres far enough from the walls that each is below
/// `1e-14` there.
pub fn random_bumps(rng: &mut ChaCha8Rng, grid: &GridSpec, hdim: usize, count: usize, width: Option<f64>) -> Vec<Bump> {
    let lmin = grid.min_length();
    (0..count)
        .map(|_| {
            let width =
                width.unwrap_or_else(|| lmin * rng.gen_range(0.03..0.06)).min(lmin / (2.0 * TAIL_WIDTHS) * 0.999);
            let margin = TAIL_WIDTHS * width;
            let center = grid.lengths().iter().map(|&l| rng.gen_range(margin..l - margin)).collect();
            let weights = (0..hdim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            Bump { center, width, weights }
        })
        .collect()
}

fn subtract_mean(f: &mut Field) {
    let d = f.hdim();
    let count = f.grid().len() as f64;
    let mut mean = vec![Complex64::new(0.0, 0.0); d];
    for p in 0..f.grid().len() {
        for (m, v) in mean.iter_mut().zip(f.fiber(p)) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= count;
    }
    for p in 0..f.grid().len() {
        for (v, m) in f.fiber_mut(p).iter_mut().zip(&mean) {
            *v -= m;
        }
    }
}

fn bump_field(grid: &GridSpec, hdim: usize, bumps: &[Bump], scale: f64, zero_mean: bool) -> Result<Field> {
    let mut f = Field::from_fn(grid, hdim, |x| {
        let mut v = vec![Complex64::new(0.0, 0.0); hdim];
        for b in bumps {
            let g = scale * b.eval(x);
            for (vi, w) in v.iter_mut().zip(&b.weights) {
                vi.re += w * g;
            }
        }
        v
    })?;
    if zero_mean {
        subtract_mean(&mut f);
    }
    Ok(f)
}

/// Real Gaussian-bump data `(φ, ψ)` derived from `seed`.
pub fn gaussian_data(grid: &GridSpec, hdim: usize, seed: u64, spec: &BumpSpec) -> Result<(Field, Field)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b_phi = random_bumps(&mut rng, grid, hdim, spec.count, spec.width);
    let b_psi = random_bumps(&mut rng, grid, hdim, spec.count, spec.width);
    Ok((
        bump_field(grid, hdim, &b_phi, spec.amplitude, spec.zero_mean)?,
        bump_field(grid, hdim, &b_psi, spec.amplitude, spec.zero_mean)?,
    ))
}

/// A single centred Gaussian of width `width` in every component.
pub fn centered_gaussian(grid: &GridSpec, hdim: usize, width: f64) -> Result<Field> {
    let center: Vec<f64> = grid.lengths().iter().map(|l| l / 2.0).collect();
    let bump = Bump { center, width, weights: vec![1.0; hdim] };
    bump_field(grid, hdim, &[bump], 1.0, false)
}

/// `a e^{iξ·x}` in `component`, zero elsewhere.
pub fn single_mode(
    grid: &GridSpec,
    hdim: usize,
    frequency: &[i64],
    component: usize,
    amplitude: Complex64,
) -> Result<Field> {
    if frequency.len() != grid.dim() || component >= hdim {
        return Err(Error::ShapeMismatch("frequency or component does not fit the grid".into()));
    }
    let k = grid.wavevector(grid.frequency_index(frequency));
    Field::from_fn(grid, hdim, |x| {
        let phase: f64 = x.iter().zip(&k).map(|(a, b)| a * b).sum();
        let mut v = vec![Complex64::new(0.0, 0.0); hdim];
        v[component] = amplitude * Complex64::new(0.0, phase).exp();
        v
    })
}

/// `F(t, x) = Σ_b cos(ω_b t + θ_b) g_b(x)` on `times`, from `seed`.
pub fn gaussian_source(grid: &GridSpec, hdim: usize, seed: u64, spec: &BumpSpec, times: TimeGrid) -> Result<Source> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = random_bumps(&mut rng, grid, hdim, spec.count, spec.width);
    let phases: Vec<(f64, f64)> =
        (0..spec.count).map(|_| (rng.gen_range(0.5..3.0), rng.gen_range(0.0..std::f64::consts::TAU))).collect();
    let fields = times
        .times()
        .map(|t| {
            let scaled: Vec<Bump> = shape
                .iter()
                .zip(&phases)
                .map(|(b, (w, th))| {
                    let c = (w * t + th).cos();
                    Bump { weights: b.weights.iter().map(|x| x * c).collect(), ..b.clone() }
                })
                .collect();
            bump_field(grid, hdim, &scaled, spec.amplitude, spec.zero_mean)
        })
        .collect::<Result<Vec<_>>>()?;
    Source::sampled(times, &fields)
}

/// Reads a snapshot file onto `grid`.
pub fn load_field(path: &Path, grid: &GridSpec) -> Result<Field> {
    let f = read_field(BufReader::new(File::open(path)?), grid.lengths())?;
    if f.grid() != grid {
        return Err(Error::ShapeMismatch(format!("{} does not match the configured grid", path.display())));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::forward_transform;

    #[test]
    fn seeded_and_compact() {
        let grid = GridSpec::cube(2, 32, 10.0).unwrap();
        let (a, b) = gaussian_data(&grid, 2, 5, &BumpSpec::new(3)).unwrap();
        let (c, _) = gaussian_data(&grid, 2, 5, &BumpSpec::new(3)).unwrap();
        assert_eq!(a, c);
        assert_ne!(a, b);
        // the walls x = 0 and y = 0
        for p in 0..grid.len() {
            let idx = grid.unflatten(p);
            if idx.contains(&0) {
                assert!(a.fiber(p).iter().all(|v| v.norm() < 1e-14));
            }
        }
        assert!(a.is_real(0.0));
    }

    #[test]
    fn zero_mean_removes_the_constant_mode() {
        let grid = GridSpec::cube(2, 16, 6.0).unwrap();
        let (a, _) = gaussian_data(&grid, 1, 1, &BumpSpec { zero_mean: true, ..BumpSpec::new(2) }).unwrap();
        let g = forward_transform(&a).unwrap();
        let peak = g.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(g.fiber(0)[0].norm() < 1e-13 * peak);
    }

    #[test]
    fn single_mode_is_one_coefficient() {
        let grid = GridSpec::cube(2, 8, 4.0).unwrap();
        let f = single_mode(&grid, 2, &[1, -2], 1, Complex64::new(0.5, 0.0)).unwrap();
        let g = forward_transform(&f).unwrap();
        let k = grid.frequency_index(&[1, -2]);
        let nonzero: Vec<usize> = (0..g.values().len()).filter(|&i| g.values()[i].norm() > 1e-12).collect();
        assert_eq!(nonzero, vec![2 * k + 1]);
    }
}
