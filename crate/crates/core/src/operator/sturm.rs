use nalgebra::DMatrix;

use super::OperatorSpec;
use crate::{Error, Result};

/// Finite-difference matrix of `-(a u')' + c u` on `(0, 1)` with Dirichlet
/// ends.
///
/// `points` counts the nodes including both ends; `a` and `c` are sampled at
/// every node. The result acts on the `points − 2` interior nodes, with `a`
/// at cell midpoints taken as the mean of the neighbouring node values.
pub fn build_sturm_liouville(a: &[f64], c: &[f64], points: usize) -> Result<OperatorSpec> {
    if points < 3 {
        return Err(Error::InvalidOperator(format!("need at least 3 nodes, got {points}")));
    }
    if a.len() != points || c.len() != points {
        return Err(Error::InvalidOperator(format!(
            "coefficient samples ({}, {}) do not match {points} nodes",
            a.len(),
            c.len()
        )));
    }
    if let Some(i) = a.iter().position(|&v| !(v.is_finite() && v > 0.0)) {
        return Err(Error::InvalidOperator(format!("coefficient a must be positive, a[{i}] = {}", a[i])));
    }
    if c.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { location: "potential samples".into() });
    }
    let h = 1.0 / (points - 1) as f64;
    let h2 = h * h;
    let m = points - 2;
    let mid = |i: usize| 0.5 * (a[i] + a[i + 1]);
    let matrix = DMatrix::from_fn(m, m, |r, col| {
        // interior row r sits at node r + 1
        let node = r + 1;
        if r == col {
            (mid(node - 1) + mid(node)) / h2 + c[node]
        } else if col == r + 1 {
            -mid(node) / h2
        } else if r == col + 1 {
            -mid(node - 1) / h2
        } else {
            0.0
        }
    });
    OperatorSpec::from_real(&matrix)
}

/// [`build_sturm_liouville`] with coefficients given as functions on `[0, 1]`.
pub fn sturm_liouville_from_fn(a: impl Fn(f64) -> f64, c: impl Fn(f64) -> f64, points: usize) -> Result<OperatorSpec> {
    let xs: Vec<f64> = (0..points).map(|i| i as f64 / (points.max(2) - 1) as f64).collect();
    let a: Vec<f64> = xs.iter().map(|&x| a(x)).collect();
    let c: Vec<f64> = xs.iter().map(|&x| c(x)).collect();
    build_sturm_liouville(&a, &c, points)
}
