use nalgebra::DMatrix;
use num_complex::Complex64;

use super::OperatorSpec;

/// `A_ξ = A + |ξ|²` for one Fourier mode.
///
/// Generates the trigonometric cosine family `C(t) = cos(t A_ξ^{1/2})` and
/// sine family `S(t) = A_ξ^{-1/2} sin(t A_ξ^{1/2})`, the solution operators
/// of `v'' + A_ξ v = 0` with `C(0) = I, C'(0) = 0, S(0) = 0, S'(0) = I`.
#[derive(Debug, Clone, Copy)]
pub struct ShiftedOperator<'a> {
    base: &'a OperatorSpec,
    shift: f64,
}

impl<'a> ShiftedOperator<'a> {
    /// `shift` is `|ξ|²`; it must be finite and nonnegative.
    pub fn new(base: &'a OperatorSpec, shift: f64) -> Self {
        assert!(shift.is_finite() && shift >= 0.0, "shift {shift} must be >= 0");
        Self { base, shift }
    }

    pub fn base(&self) -> &'a OperatorSpec {
        self.base
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn hdim(&self) -> usize {
        self.base.hdim()
    }

    /// Eigenvalues of `A_ξ`, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.base.eigenvalues().iter().map(|l| l + self.shift).collect()
    }

    /// Square roots of the eigenvalues: the temporal frequencies of the mode.
    pub fn frequencies(&self) -> Vec<f64> {
        self.base.eigenvalues().iter().map(|l| (l + self.shift).sqrt()).collect()
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        let d = self.hdim();
        self.base.matrix() + DMatrix::<Complex64>::identity(d, d) * Complex64::new(self.shift, 0.0)
    }

    pub fn cosine_at(&self, t: f64) -> DMatrix<Complex64> {
        self.base.spectral_matrix(self.shift, |mu| (t * mu.sqrt()).cos())
    }

    pub fn sine_at(&self, t: f64) -> DMatrix<Complex64> {
        self.base.spectral_matrix(self.shift, |mu| sine_kernel(mu, t))
    }

    /// `A_ξ S(t)`.
    pub fn shifted_sine_at(&self, t: f64) -> DMatrix<Complex64> {
        self.base.spectral_matrix(self.shift, |mu| mu.sqrt() * (t * mu.sqrt()).sin())
    }

    pub fn apply_cosine(&self, t: f64, x: &[Complex64]) -> Vec<Complex64> {
        self.base.apply_spectral(self.shift, |mu| (t * mu.sqrt()).cos(), x)
    }

    pub fn apply_sine(&self, t: f64, x: &[Complex64]) -> Vec<Complex64> {
        self.base.apply_spectral(self.shift, |mu| sine_kernel(mu, t), x)
    }

    /// `A_ξ x`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.base.apply_spectral(self.shift, |mu| mu, x)
    }
}

fn sine_kernel(mu: f64, t: f64) -> f64 {
    let w = mu.sqrt();
    (t * w).sin() / w
}

/// Free-function form of [`ShiftedOperator::cosine_at`].
pub fn cosine_at(shifted: &ShiftedOperator<'_>, t: f64) -> DMatrix<Complex64> {
    shifted.cosine_at(t)
}

/// Free-function form of [`ShiftedOperator::sine_at`].
pub fn sine_at(shifted: &ShiftedOperator<'_>, t: f64) -> DMatrix<Complex64> {
    shifted.sine_at(t)
}
