use std::sync::Arc;

use proptest::prelude::*;
use weakcat_core::qstate::CompositeBasis;
use weakcat_core::scenarios::helicity_basis;
use weakcat_core::weakval::{expectation, weak_value, PrePostEnsemble};
use weakcat_core::{apply, basis_ket, inner, normalize, tensor_state, Complex64, LinearOperator, StateVector};

fn amplitudes(dim: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

fn unit_state(basis: Arc<CompositeBasis>) -> impl Strategy<Value = StateVector> {
    amplitudes(basis.dim()).prop_filter_map("null state", move |amps| {
        let s = StateVector::from_amplitudes(basis.clone(), amps).ok()?;
        (s.norm() > 1e-3).then(|| normalize(&s).unwrap())
    })
}

fn hermitian(basis: Arc<CompositeBasis>) -> impl Strategy<Value = LinearOperator> {
    let dim = basis.dim();
    amplitudes(dim * dim).prop_map(move |m| {
        let raw = LinearOperator::from_entries(basis.clone(), m).unwrap();
        raw.combine(Complex64::new(0.5, 0.0), &raw.adjoint(), Complex64::new(0.5, 0.0)).unwrap()
    })
}

fn path_projectors(basis: &Arc<CompositeBasis>) -> Vec<LinearOperator> {
    basis.subsystems()[0]
        .levels()
        .iter()
        .map(|l| LinearOperator::level_projector(basis.clone(), "path", l).unwrap())
        .collect()
}

#[test]
fn basis_kets_are_orthonormal() {
    let basis = helicity_basis();
    let kets: Vec<StateVector> = (0..basis.dim()).map(|i| basis_ket(&basis, &basis.labels_of(i)).unwrap()).collect();
    for (i, a) in kets.iter().enumerate() {
        for (j, b) in kets.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            assert_eq!(inner(a, b).unwrap(), Complex64::new(expected, 0.0));
        }
    }
}

#[test]
fn path_projectors_resolve_identity() {
    let basis = helicity_basis();
    let sum =
        path_projectors(&basis).iter().skip(1).fold(path_projectors(&basis)[0].clone(), |acc, p| acc.add(p).unwrap());
    assert!(sum.max_deviation(&LinearOperator::identity(basis)) <= 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projector_is_idempotent_on_states(s in unit_state(helicity_basis()), k in 0usize..5) {
        let p = &path_projectors(&helicity_basis())[k];
        let once = apply(p, &s).unwrap();
        let twice = apply(p, &once).unwrap();
        for (a, b) in once.amplitudes().iter().zip(twice.amplitudes()) {
            prop_assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn tensor_norm_is_multiplicative(a in amplitudes(3), b in amplitudes(4)) {
        let ba = Arc::new(CompositeBasis::new([("a", vec!["0", "1", "2"])]).unwrap());
        let bb = Arc::new(CompositeBasis::new([("b", vec!["w", "x", "y", "z"])]).unwrap());
        let sa = StateVector::from_amplitudes(ba, a).unwrap();
        let sb = StateVector::from_amplitudes(bb, b).unwrap();
        let t = tensor_state(&sa, &sb).unwrap();
        prop_assert!((t.norm() - sa.norm() * sb.norm()).abs() <= 1e-12);
    }

    #[test]
    fn inner_is_conjugate_symmetric(a in unit_state(helicity_basis()), b in unit_state(helicity_basis())) {
        let ab = inner(&a, &b).unwrap();
        let ba = inner(&b, &a).unwrap();
        prop_assert!((ab - ba.conj()).norm() <= 1e-15);
    }

    #[test]
    fn weak_value_is_linear(
        pre in unit_state(helicity_basis()),
        post in unit_state(helicity_basis()),
        a in hermitian(helicity_basis()),
        b in hermitian(helicity_basis()),
        alpha in (-2.0f64..2.0, -2.0f64..2.0),
        beta in (-2.0f64..2.0, -2.0f64..2.0),
    ) {
        let e = PrePostEnsemble::new(pre, post, None).unwrap();
        prop_assume!(e.overlap().norm() > 1e-3);
        let (alpha, beta) = (Complex64::new(alpha.0, alpha.1), Complex64::new(beta.0, beta.1));
        let combined = a.combine(alpha, &b, beta).unwrap();
        let lhs = weak_value("C", &combined, &e).unwrap().value;
        let rhs = alpha * weak_value("A", &a, &e).unwrap().value + beta * weak_value("B", &b, &e).unwrap().value;
        let scale = 1.0 + lhs.norm();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * scale, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn path_weak_values_sum_to_one(pre in unit_state(helicity_basis()), post in unit_state(helicity_basis())) {
        let e = PrePostEnsemble::new(pre, post, None).unwrap();
        prop_assume!(e.overlap().norm() > 1e-3);
        let total: Complex64 = path_projectors(&helicity_basis())
            .iter()
            .map(|p| weak_value("P", p, &e).unwrap().value)
            .sum();
        prop_assert!((total - Complex64::new(1.0, 0.0)).norm() <= 1e-10);
    }

    #[test]
    fn weak_value_ignores_state_scaling(
        pre in unit_state(helicity_basis()),
        post in unit_state(helicity_basis()),
        a in hermitian(helicity_basis()),
        z in (0.1f64..3.0, -3.0f64..3.0),
    ) {
        let e = PrePostEnsemble::new(pre.clone(), post.clone(), None).unwrap();
        prop_assume!(e.overlap().norm() > 1e-3);
        let factor = Complex64::from_polar(z.0, z.1);
        let scaled_pre = PrePostEnsemble::normalized(&pre.scaled(factor), &post, None).unwrap();
        let scaled_post = PrePostEnsemble::normalized(&pre, &post.scaled(factor), None).unwrap();
        let w = weak_value("A", &a, &e).unwrap().value;
        for other in [scaled_pre, scaled_post] {
            let w2 = weak_value("A", &a, &other).unwrap().value;
            prop_assert!((w - w2).norm() <= 1e-12 * (1.0 + w.norm()));
        }
    }

    #[test]
    fn self_postselection_gives_expectation(s in unit_state(helicity_basis()), a in hermitian(helicity_basis())) {
        let e = PrePostEnsemble::new(s.clone(), s.clone(), None).unwrap();
        let w = weak_value("A", &a, &e).unwrap().value;
        let x = expectation(&a, &s).unwrap();
        prop_assert!((w - Complex64::new(x, 0.0)).norm() <= 1e-10);
    }
}
