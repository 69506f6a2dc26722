//! Transforms, multipliers and the norms every estimate is built from.

use std::f64::consts::TAU;

use multiwave::spectral::{
    apply_scalar_multiplier, forward_transform, inverse_transform, lebesgue_norm, mixed_norm, sobolev_norm, Field,
    GridSpec, SobolevSpec,
};
use multiwave::Complex64;

fn main() -> multiwave::Result<()> {
    let grid = GridSpec::cube(2, 64, TAU)?;
    let f = Field::from_fn(&grid, 1, |x| vec![Complex64::new((x[0].sin() * x[1].cos()).exp() - 1.0, 0.0)])?;

    let g = forward_transform(&f)?;
    let back = inverse_transform(&g);
    let err = f.values().iter().zip(back.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    println!("round trip error      {err:.2e}");

    for p in [1.0, 2.0, 4.0, f64::INFINITY] {
        println!("L^{p:<3} norm           {:.6}", lebesgue_norm(&f, p)?);
    }
    println!("H^1 norm              {:.6}", sobolev_norm(&f, SobolevSpec::inhomogeneous(1.0))?);
    println!("homogeneous H^1/2     {:.6}", sobolev_norm(&f, SobolevSpec::homogeneous(0.5))?);

    // Laplacian as a Fourier multiplier
    let lap = apply_scalar_multiplier(&g, |xi: &[f64]| Complex64::new(-xi.iter().map(|k| k * k).sum::<f64>(), 0.0))?;
    println!("||Δf||_2              {:.6}", lebesgue_norm(&inverse_transform(&lap), 2.0)?);

    let samples: Vec<Field> = (0..=10).map(|j| f.scaled(Complex64::new((0.1 * j as f64).cos(), 0.0))).collect();
    println!("L^4_t L^2_x on [0,1]  {:.6}", mixed_norm(&samples, 0.1, 4.0, 2.0)?);
    Ok(())
}
