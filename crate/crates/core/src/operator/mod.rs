//! The fiber operator `A` as a Hermitian positive-definite matrix.
//!
//! Everything downstream is a function of `A` evaluated through its cached
//! eigendecomposition `A = V Λ V*`: fractional powers, the per-mode shifted
//! operator `A_ξ = A + |ξ|²` and its cosine/sine families.

mod shifted;
mod sturm;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub use shifted::{cosine_at, sine_at, ShiftedOperator};
pub use sturm::{build_sturm_liouville, sturm_liouville_from_fn};

use crate::{Error, Result};

/// Relative tolerance for `‖A − A*‖` and for the positivity margin, both
/// measured against the spectral radius.
pub const SPECTRAL_TOL: f64 = 1e-12;

const RECONSTRUCTION_TOL: f64 = 1e-11;

/// A validated absolute-positive operator with its eigendecomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    matrix: DMatrix<Complex64>,
    /// ascending
    eigenvalues: Vec<f64>,
    /// unitary; column `i` belongs to `eigenvalues[i]`
    eigenvectors: DMatrix<Complex64>,
}

/// Validates `matrix` and caches its eigendecomposition.
///
/// Rejects non-square, non-finite and non-Hermitian input, and any matrix
/// whose smallest eigenvalue is not strictly positive.
pub fn build_operator(matrix: DMatrix<Complex64>) -> Result<OperatorSpec> {
    if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
        return Err(Error::InvalidOperator(format!(
            "matrix is {}x{}, expected square",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { location: "operator matrix".into() });
    }
    let norm = matrix.norm();
    let defect = (&matrix - matrix.adjoint()).norm();
    if defect > SPECTRAL_TOL * norm {
        return Err(Error::NotHermitian { defect: defect / norm });
    }
    let eig = SymmetricEigen::new(matrix.clone());
    let d = matrix.nrows();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = DMatrix::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);

    let radius = eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max);
    let margin = eigenvalues[0];
    if radius == 0.0 || margin <= SPECTRAL_TOL * radius {
        return Err(Error::NotPositive { margin });
    }
    let op = OperatorSpec { matrix, eigenvalues, eigenvectors };
    let rebuilt = op.spectral_matrix(0.0, |l| l);
    let err = (&rebuilt - &op.matrix).norm();
    if err > RECONSTRUCTION_TOL * norm {
        return Err(Error::InvalidOperator(format!("eigendecomposition residual {:.3e}", err / norm)));
    }
    Ok(op)
}

impl OperatorSpec {
    /// Diagonal operator with the given (positive) entries.
    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        let d = entries.len();
        build_operator(DMatrix::from_fn(d, d, |r, c| Complex64::new(if r == c { entries[r] } else { 0.0 }, 0.0)))
    }

    /// Scalar operator `a` on `H = ℂ`.
    pub fn scalar(a: f64) -> Result<Self> {
        Self::diagonal(&[a])
    }

    pub fn from_real(matrix: &DMatrix<f64>) -> Result<Self> {
        build_operator(matrix.map(|v| Complex64::new(v, 0.0)))
    }

    pub fn hdim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    /// Smallest eigenvalue, the positivity margin `ω`.
    pub fn positivity_margin(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn spectral_radius(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    /// `V · diag(f(λ_i + shift)) · V*`.
    pub fn spectral_matrix(&self, shift: f64, f: impl Fn(f64) -> f64) -> DMatrix<Complex64> {
        let v = &self.eigenvectors;
        let d = self.hdim();
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l + shift)).collect();
        let mut scaled = v.clone();
        for c in 0..d {
            for r in 0..d {
                scaled[(r, c)] *= weights[c];
            }
        }
        scaled * v.adjoint()
    }

    /// Coordinates of `x` in the eigenbasis, `V* x`.
    pub fn to_eigenbasis(&self, x: &[Complex64]) -> Vec<Complex64> {
        let v = &self.eigenvectors;
        let d = self.hdim();
        (0..d).map(|i| (0..d).map(|r| v[(r, i)].conj() * x[r]).sum()).collect()
    }

    /// Inverse of [`Self::to_eigenbasis`], `V w`.
    pub fn from_eigenbasis(&self, w: &[Complex64]) -> Vec<Complex64> {
        let v = &self.eigenvectors;
        let d = self.hdim();
        (0..d).map(|r| (0..d).map(|i| v[(r, i)] * w[i]).sum()).collect()
    }

    /// `f(A + shift) x` without forming the matrix.
    pub fn apply_spectral(&self, shift: f64, f: impl Fn(f64) -> f64, x: &[Complex64]) -> Vec<Complex64> {
        let mut w = self.to_eigenbasis(x);
        for (wi, &l) in w.iter_mut().zip(&self.eigenvalues) {
            *wi *= f(l + shift);
        }
        self.from_eigenbasis(&w)
    }

    /// `A^θ` for `θ ≥ 0`.
    pub fn fractional_power(&self, theta: f64) -> Result<DMatrix<Complex64>> {
        if !(theta.is_finite() && theta >= 0.0) {
            return Err(Error::InvalidExponent(format!("fractional power {theta} must be >= 0")));
        }
        Ok(self.spectral_matrix(0.0, |l| l.powf(theta)))
    }

    /// The operator `A + shift` of one Fourier mode.
    pub fn shifted(&self, shift: f64) -> ShiftedOperator<'_> {
        ShiftedOperator::new(self, shift)
    }
}

/// Free-function form of [`OperatorSpec::fractional_power`].
pub fn fractional_power(op: &OperatorSpec, theta: f64) -> Result<DMatrix<Complex64>> {
    op.fractional_power(theta)
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    pub(crate) fn random_spd(d: usize, seed: u64) -> DMatrix<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = DMatrix::from_fn(d, d, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        &b * b.adjoint() + DMatrix::identity(d, d) * Complex64::new(0.5, 0.0)
    }

    fn rel(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn scalar_operator() {
        let op = OperatorSpec::scalar(4.0).unwrap();
        assert_eq!(op.eigenvalues(), &[4.0]);
        assert_eq!(op.positivity_margin(), 4.0);
    }

    #[test]
    fn two_by_two_eigenvalues() {
        let op = OperatorSpec::from_real(&DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0])).unwrap();
        assert!((op.eigenvalues()[0] - 1.0).abs() < 1e-14);
        assert!((op.eigenvalues()[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_degenerate_and_non_hermitian() {
        match OperatorSpec::scalar(0.0) {
            Err(Error::NotPositive { margin }) => assert_eq!(margin, 0.0),
            other => panic!("{other:?}"),
        }
        assert!(matches!(OperatorSpec::diagonal(&[1.0, -1.0]), Err(Error::NotPositive { .. })));
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 2.0]);
        assert!(matches!(OperatorSpec::from_real(&m), Err(Error::NotHermitian { .. })));
        assert!(build_operator(DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn hermitian_complex_operator() {
        let m = random_spd(4, 1);
        let op = build_operator(m.clone()).unwrap();
        assert!(op.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        let v = op.eigenvectors();
        assert!(rel(&(v.adjoint() * v), &DMatrix::identity(4, 4)) < 1e-12);
        assert!(rel(&op.spectral_matrix(0.0, |l| l), &m) < 1e-12);
    }

    #[test]
    fn fractional_powers() {
        let op = OperatorSpec::diagonal(&[4.0, 9.0]).unwrap();
        let root = op.fractional_power(0.5).unwrap();
        assert!(
            rel(&root, &DMatrix::from_diagonal(&nalgebra::dvector![2.0, 3.0].map(|v| Complex64::new(v, 0.0)))) < 1e-15
        );

        let op = build_operator(random_spd(3, 2)).unwrap();
        assert!(rel(&op.fractional_power(0.0).unwrap(), &DMatrix::identity(3, 3)) < 1e-12);
        assert!(rel(&op.fractional_power(1.0).unwrap(), op.matrix()) < 1e-12);
        let half = op.fractional_power(0.5).unwrap();
        assert!(rel(&(&half * &half), op.matrix()) < 1e-10);
        assert!(op.fractional_power(-0.5).is_err());
    }

    #[test]
    fn fractional_power_exponent_law() {
        let op = build_operator(random_spd(3, 3)).unwrap();
        for (a, b) in [(0.25, 0.5), (0.3, 0.7), (1.0, 0.5)] {
            let lhs = op.fractional_power(a).unwrap() * op.fractional_power(b).unwrap();
            assert!(rel(&lhs, &op.fractional_power(a + b).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn eigenbasis_round_trip() {
        let op = build_operator(random_spd(3, 4)).unwrap();
        let x = vec![Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.0), Complex64::new(0.0, 1.0)];
        let back = op.from_eigenbasis(&op.to_eigenbasis(&x));
        for (a, b) in back.iter().zip(&x) {
            assert!((a - b).norm() < 1e-14);
        }
        let ax = op.apply_spectral(0.0, |l| l, &x);
        let direct = op.matrix() * nalgebra::DVector::from_column_slice(&x);
        for (a, b) in ax.iter().zip(direct.iter()) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
