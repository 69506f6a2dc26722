//! Sup-norm decay of the free wave from a localized bump, before the
//! periodic images return.

use std::f64::consts::PI;

use multiwave::operator::OperatorSpec;
use multiwave::scenario::centered_gaussian;
use multiwave::spectral::GridSpec;
use multiwave::strichartz::dispersive_ratio;

fn main() -> multiwave::Result<()> {
    let grid = GridSpec::cube(2, 512, 64.0 * PI)?;
    let data = centered_gaussian(&grid, 1, 1.0)?;
    let times: Vec<f64> = (2..=10).map(|j| 5.0 * j as f64).collect();
    let op = OperatorSpec::scalar(1.0)?;
    for alpha in [0.0, 0.5] {
        let r = dispersive_ratio(&op, alpha, f64::INFINITY, &data, &times)?;
        println!("alpha = {alpha}, wrap bound {:.1}", r.wrap_bound);
        for (t, (n, q)) in r.times.iter().zip(r.norms.iter().zip(&r.ratios)) {
            println!("  t = {t:5.1}  |u|_inf = {n:.4e}  ratio = {q:.4}");
        }
        if let Some(fit) = r.fit {
            println!(
                "  fit: t^-{:.3} (rms {:.1e}), (1+t)^-{:.3} (rms {:.1e}), better {:?}",
                fit.power_exponent, fit.power_rms, fit.shifted_exponent, fit.shifted_rms, fit.better
            );
        }
    }
    Ok(())
}
