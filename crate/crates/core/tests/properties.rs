use std::f64::consts::TAU;

use multiwave::multipoint::{initial_pair, LinearProblem, MultipointSpec, SolverOptions};
use multiwave::operator::OperatorSpec;
use multiwave::oracle::relative_difference;
use multiwave::scenario::{format_complex, parse_complex};
use multiwave::spectral::{forward_transform, inverse_transform, lebesgue_norm, Field, GridSpec};
use multiwave::strichartz::{classify_pair, Exponent};
use multiwave::Complex64;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn field(grid: &GridSpec, hdim: usize, values: &[(f64, f64)]) -> Field {
    let v = values.iter().cycle().take(grid.len() * hdim).map(|&(a, b)| Complex64::new(a, b)).collect();
    Field::new(grid.clone(), hdim, v).unwrap()
}

fn exponent() -> impl Strategy<Value = Exponent> {
    prop_oneof![
        (2i64..40, 1i64..6).prop_filter("at least 2", |(n, d)| *n >= 2 * *d).prop_map(|(n, d)| Exponent::ratio(n, d)),
        Just(Exponent::Infinite),
    ]
}

fn spd(entries: &[f64], d: usize) -> OperatorSpec {
    let b = DMatrix::from_iterator(d, d, entries.iter().copied().cycle().take(d * d));
    OperatorSpec::from_real(&(b.transpose() * &b + DMatrix::identity(d, d) * 0.3)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_round_trip(values in prop::collection::vec((-1.0..1.0, -1.0..1.0), 1..64), hdim in 1usize..3) {
        let grid = GridSpec::new(vec![8, 4], vec![TAU, 3.0]).unwrap();
        let f = field(&grid, hdim, &values);
        let back = inverse_transform(&forward_transform(&f).unwrap());
        for (a, b) in f.values().iter().zip(back.values()) {
            prop_assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn plancherel(values in prop::collection::vec((-1.0..1.0, -1.0..1.0), 1..64)) {
        let grid = GridSpec::cube(2, 8, 5.0).unwrap();
        let f = field(&grid, 2, &values);
        let g = forward_transform(&f).unwrap();
        let physical = lebesgue_norm(&f, 2.0).unwrap();
        prop_assert!((physical - g.l2_norm()).abs() <= 1e-12 * physical.max(1.0));
    }

    #[test]
    fn admissibility_is_monotone(n in 2u32..7, q in exponent(), r in exponent(), q2 in exponent()) {
        let v = classify_pair(n, q, r).unwrap();
        prop_assert_eq!(v.admissible, !v.excluded_triple && v.lhs <= v.rhs);
        prop_assert!(!v.sharp || v.lhs == v.rhs);
        let w = classify_pair(n, q2, r).unwrap();
        if v.admissible && q2.reciprocal() <= q.reciprocal() && !w.excluded_triple {
            prop_assert!(w.admissible);
        }
    }

    #[test]
    fn conjugation_is_an_involution(q in exponent()) {
        prop_assert_eq!(q.conjugate().conjugate(), q);
    }

    #[test]
    fn trigonometric_identity(entries in prop::collection::vec(-1.0..1.0, 4), shift in 0.0..20.0, t in -3.0..3.0) {
        let op = spd(&entries, 2);
        let s = op.shifted(shift);
        let (c, sn) = (s.cosine_at(t), s.sine_at(t));
        let id = &c * &c + s.matrix() * &sn * &sn;
        prop_assert!((id - DMatrix::<Complex64>::identity(2, 2)).norm() < 1e-10);
    }

    #[test]
    fn complex_literals_round_trip(re in -1e3..1e3, im in -1e3..1e3) {
        let z = Complex64::new(re, im);
        prop_assert_eq!(parse_complex(&format_complex(z)), Some(z));
    }

    #[test]
    fn cauchy_pair_is_the_data(values in prop::collection::vec((-1.0..1.0, Just(0.0)), 1..32), entries in prop::collection::vec(-1.0..1.0, 9)) {
        let grid = GridSpec::cube(2, 8, TAU).unwrap();
        let phi = field(&grid, 3, &values);
        let psi = phi.scaled(Complex64::new(0.5, 0.0));
        let problem = LinearProblem::homogeneous(spd(&entries, 3), phi.clone(), psi.clone(), 1.0).unwrap();
        let (u0, u1, _) = initial_pair(&problem, &MultipointSpec::cauchy(), &SolverOptions::default()).unwrap();
        prop_assert!(relative_difference(&u0, &forward_transform(&phi).unwrap()).unwrap() < 1e-14);
        prop_assert!(relative_difference(&u1, &forward_transform(&psi).unwrap()).unwrap() < 1e-14);
    }
}
