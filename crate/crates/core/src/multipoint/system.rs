use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::MultipointSpec;
use crate::operator::ShiftedOperator;
use crate::{Error, Result};

/// Default bound on `‖D(ξ)⁻¹‖` before a mode counts as singular.
pub const DEFAULT_CONDITION_CAP: f64 = 1e12;

/// The 2×2 block system of one Fourier mode,
///
/// ```text
/// a11 u0 + a12 u1 = f1
/// a21 u0 + a22 u1 = f2
/// ```
///
/// with `a11 = I − Σ α C(λ)`, `a12 = −Σ α S(λ)`, `a21 = Σ β A_ξ S(λ)`,
/// `a22 = I − Σ β C(λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeBlocks {
    pub a11: DMatrix<Complex64>,
    pub a12: DMatrix<Complex64>,
    pub a21: DMatrix<Complex64>,
    pub a22: DMatrix<Complex64>,
    /// Integer frequency of the mode, used in diagnostics.
    pub frequency: Vec<i64>,
}

impl ModeBlocks {
    pub fn at_frequency(mut self, frequency: Vec<i64>) -> Self {
        self.frequency = frequency;
        self
    }

    pub fn hdim(&self) -> usize {
        self.a11.nrows()
    }
}

/// `D(ξ)` together with its conditioning.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeDeterminant {
    pub matrix: DMatrix<Complex64>,
    /// `det D(ξ)` as a complex number.
    pub det: Complex64,
    pub inverse_norm: f64,
    /// `‖D‖ ‖D⁻¹‖` in the spectral norm.
    pub condition: f64,
}

pub fn assemble_mode_system(spec: &MultipointSpec, shifted: &ShiftedOperator<'_>) -> ModeBlocks {
    let d = shifted.hdim();
    let id = DMatrix::<Complex64>::identity(d, d);
    let zero = DMatrix::<Complex64>::zeros(d, d);
    let (mut a11, mut a12, mut a21, mut a22) = (id.clone(), zero.clone(), zero, id);
    for ((a, b), &l) in spec.alphas().iter().zip(spec.betas()).zip(spec.lambdas()) {
        let c = shifted.cosine_at(l);
        let s = shifted.sine_at(l);
        let as_ = shifted.shifted_sine_at(l);
        a11 -= &c * *a;
        a12 -= &s * *a;
        a21 += &as_ * *b;
        a22 -= &c * *b;
    }
    ModeBlocks { a11, a12, a21, a22, frequency: Vec::new() }
}

/// `a11 a22 − a12 a21`; the blocks commute.
pub fn determinant(blocks: &ModeBlocks) -> DMatrix<Complex64> {
    &blocks.a11 * &blocks.a22 - &blocks.a12 * &blocks.a21
}

/// `I − Σ (α_k+β_k) C(λ_k) + Σ_kj α_k β_j [C(λ_k)C(λ_j) + A_ξ S(λ_k)S(λ_j)]`,
/// built without the blocks.
pub fn closed_form_determinant(spec: &MultipointSpec, shifted: &ShiftedOperator<'_>) -> DMatrix<Complex64> {
    let d = shifted.hdim();
    let a = shifted.matrix();
    let mut out = DMatrix::<Complex64>::identity(d, d);
    let m = spec.count();
    let c: Vec<_> = spec.lambdas().iter().map(|&l| shifted.cosine_at(l)).collect();
    let s: Vec<_> = spec.lambdas().iter().map(|&l| shifted.sine_at(l)).collect();
    for k in 0..m {
        out -= &c[k] * (spec.alphas()[k] + spec.betas()[k]);
        for j in 0..m {
            let bracket = &c[k] * &c[j] + &a * &s[k] * &s[j];
            out += bracket * (spec.alphas()[k] * spec.betas()[j]);
        }
    }
    out
}

/// `D(ξ)` with its conditioning; fails when `‖D⁻¹‖ > cap`.
pub fn mode_determinant(blocks: &ModeBlocks, cap: f64) -> Result<ModeDeterminant> {
    let matrix = determinant(blocks);
    let sv = matrix.clone().svd(false, false).singular_values;
    let smax = sv.max();
    let smin = sv.min();
    let inverse_norm = if smin > 0.0 { 1.0 / smin } else { f64::INFINITY };
    if !(inverse_norm <= cap) {
        return Err(Error::SingularModes { frequencies: vec![blocks.frequency.clone()] });
    }
    let det = matrix.determinant();
    Ok(ModeDeterminant { matrix, det, inverse_norm, condition: smax * inverse_norm })
}

/// Block Cramer: `u0 = D⁻¹[a22 f1 − a12 f2]`, `u1 = D⁻¹[a11 f2 − a21 f1]`.
pub fn solve_initial_pair(
    blocks: &ModeBlocks,
    det: &ModeDeterminant,
    f1: &[Complex64],
    f2: &[Complex64],
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let f1 = DVector::from_column_slice(f1);
    let f2 = DVector::from_column_slice(f2);
    let lu = det.matrix.clone().lu();
    let r0 = &blocks.a22 * &f1 - &blocks.a12 * &f2;
    let r1 = &blocks.a11 * &f2 - &blocks.a21 * &f1;
    let singular = || Error::SingularModes { frequencies: vec![blocks.frequency.clone()] };
    let u0 = lu.solve(&r0).ok_or_else(singular)?;
    let u1 = lu.solve(&r1).ok_or_else(singular)?;
    Ok((u0.as_slice().to_vec(), u1.as_slice().to_vec()))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::operator::{build_operator, OperatorSpec};

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn cauchy_blocks_are_identity() {
        let op = OperatorSpec::diagonal(&[1.0, 2.0]).unwrap();
        let b = assemble_mode_system(&MultipointSpec::cauchy(), &op.shifted(3.0));
        assert_eq!(b.a11, DMatrix::identity(2, 2));
        assert_eq!(b.a12, DMatrix::zeros(2, 2));
        assert_eq!(determinant(&b), DMatrix::identity(2, 2));
    }

    #[test]
    fn scalar_entries() {
        let op = OperatorSpec::scalar(1.0).unwrap();
        let spec = MultipointSpec::real(&[0.3], &[0.2], &[0.7]).unwrap();
        let b = assemble_mode_system(&spec, &op.shifted(0.0));
        assert!((b.a11[(0, 0)] - c(1.0 - 0.3 * 0.7f64.cos())).norm() < 1e-15);
        assert!((b.a12[(0, 0)] - c(-0.3 * 0.7f64.sin())).norm() < 1e-15);
        assert!((b.a21[(0, 0)] - c(0.2 * 0.7f64.sin())).norm() < 1e-15);
        assert!((b.a22[(0, 0)] - c(1.0 - 0.2 * 0.7f64.cos())).norm() < 1e-15);
    }

    #[test]
    fn two_point_hand_expansion() {
        // A_ξ = ω², α = (a1, a2), β = (b1, b2)
        let w: f64 = 1.3;
        let op = OperatorSpec::scalar(w * w).unwrap();
        let (a1, a2, b1, b2) = (0.2, -0.15, 0.1, 0.25);
        let (l1, l2) = (0.4, 1.1);
        let spec = MultipointSpec::real(&[a1, a2], &[b1, b2], &[l1, l2]).unwrap();
        let dm = determinant(&assemble_mode_system(&spec, &op.shifted(0.0)))[(0, 0)];
        let (c1, c2) = ((w * l1).cos(), (w * l2).cos());
        let (s1, s2) = ((w * l1).sin() / w, (w * l2).sin() / w);
        let a11 = 1.0 - a1 * c1 - a2 * c2;
        let a22 = 1.0 - b1 * c1 - b2 * c2;
        let a12 = -(a1 * s1 + a2 * s2);
        let a21 = w * w * (b1 * s1 + b2 * s2);
        assert!((dm - c(a11 * a22 - a12 * a21)).norm() < 1e-14);
    }

    #[test]
    fn scalar_determinant_examples() {
        let op = OperatorSpec::scalar(1.0).unwrap();
        let spec = MultipointSpec::real(&[0.25], &[0.25], &[PI / 2.0]).unwrap();
        let b = assemble_mode_system(&spec, &op.shifted(0.0));
        let det = mode_determinant(&b, DEFAULT_CONDITION_CAP).unwrap();
        assert!((det.det - c(17.0 / 16.0)).norm() < 1e-14);
        let closed = 1.0 - 0.5 * (PI / 2.0).cos() + 0.0625;
        assert!((det.det - c(closed)).norm() < 1e-14);

        let (u0, u1) = solve_initial_pair(&b, &det, &[c(1.0)], &[c(0.0)]).unwrap();
        assert!((u0[0] - b.a22[(0, 0)] / c(17.0 / 16.0)).norm() < 1e-14);
        assert!((u0[0] - c(16.0 / 17.0)).norm() < 1e-14);
        assert!((u1[0] + b.a21[(0, 0)] / c(17.0 / 16.0)).norm() < 1e-14);

        let singular = MultipointSpec::real(&[1.0], &[1.0], &[2.0 * PI]).unwrap();
        let b = assemble_mode_system(&singular, &op.shifted(0.0)).at_frequency(vec![3, -1]);
        match mode_determinant(&b, DEFAULT_CONDITION_CAP) {
            Err(Error::SingularModes { frequencies }) => assert_eq!(frequencies, vec![vec![3, -1]]),
            other => panic!("{other:?}"),
        }
    }

    fn complex_operator() -> OperatorSpec {
        let m = DMatrix::from_row_slice(2, 2, &[c(2.0), Complex64::new(0.3, -0.4), Complex64::new(0.3, 0.4), c(1.2)]);
        build_operator(m).unwrap()
    }

    #[test]
    fn closed_form_matches_blocks() {
        let op = complex_operator();
        let spec = MultipointSpec::new(
            vec![Complex64::new(0.2, 0.1), Complex64::new(-0.1, 0.05), c(0.07)],
            vec![Complex64::new(0.1, -0.2), c(0.3), Complex64::new(0.0, 0.1)],
            vec![0.3, 0.9, 1.7],
        )
        .unwrap();
        for shift in [0.0, 1.0, 7.5] {
            let s = op.shifted(shift);
            let lhs = determinant(&assemble_mode_system(&spec, &s));
            let rhs = closed_form_determinant(&spec, &s);
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn cramer_back_substitution() {
        let op = complex_operator();
        let spec = MultipointSpec::new(
            vec![Complex64::new(0.3, 0.1), c(-0.2)],
            vec![Complex64::new(0.1, 0.2), c(0.25)],
            vec![0.5, 1.25],
        )
        .unwrap();
        let s = op.shifted(2.0);
        let b = assemble_mode_system(&spec, &s);
        let det = mode_determinant(&b, DEFAULT_CONDITION_CAP).unwrap();
        let f1 = vec![Complex64::new(1.0, -0.5), c(0.3)];
        let f2 = vec![c(-0.2), Complex64::new(0.0, 0.8)];
        let (u0, u1) = solve_initial_pair(&b, &det, &f1, &f2).unwrap();
        let (u0, u1) = (DVector::from_vec(u0), DVector::from_vec(u1));
        let r1 = &b.a11 * &u0 + &b.a12 * &u1 - DVector::from_vec(f1.clone());
        let r2 = &b.a21 * &u0 + &b.a22 * &u1 - DVector::from_vec(f2.clone());
        let scale = DVector::from_vec(f1).norm() + DVector::from_vec(f2).norm();
        assert!(r1.norm() <= 1e-11 * scale);
        assert!(r2.norm() <= 1e-11 * scale);
        assert!(det.condition >= 1.0);
    }
}
