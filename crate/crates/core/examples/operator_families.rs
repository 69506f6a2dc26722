//! Positive Hermitian operators, fractional powers and the cosine/sine families.

use multiwave::operator::{sturm_liouville_from_fn, OperatorSpec};
use multiwave::Complex64;
use nalgebra::DMatrix;

fn main() -> multiwave::Result<()> {
    let op = OperatorSpec::from_real(&DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.5]))?;
    println!("eigenvalues           {:?}", op.eigenvalues());
    println!("positivity margin     {:.4}", op.positivity_margin());

    let half = op.fractional_power(0.5)?;
    let err = (&half * &half - op.matrix()).norm();
    println!("|A^(1/2)^2 - A|       {err:.2e}");

    // the fiber of frequency ξ sees A + |ξ|²
    let shifted = op.shifted(4.0);
    let t = 0.7;
    let (c, s) = (shifted.cosine_at(t), shifted.sine_at(t));
    let identity = &c * &c + shifted.matrix() * &s * &s;
    println!("|C² + A_ξ S² - I|     {:.2e}", (identity - DMatrix::<Complex64>::identity(2, 2)).norm());

    let sl = sturm_liouville_from_fn(|x| 1.0 + x, |x| 0.5 + x * x, 6)?;
    println!("Sturm-Liouville (6)   {:?}", sl.eigenvalues().iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>());
    Ok(())
}
