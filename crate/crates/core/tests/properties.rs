//! Property-based invariants over randomized matrices and tensors.

use proptest::prelude::*;

use qverify::diagrams::{extract_phase, spider_named, tensors_equal, ClassicalSystem, IndexedTensor};
use qverify::numerics::{c, Complex64, ComplexMatrix};

fn complex_strategy() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| c(re, im))
}

fn matrix_strategy(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex_strategy(), rows * cols)
        .prop_map(move |v| ComplexMatrix::new(rows, cols, v).unwrap())
}

fn scalar_tensor_strategy(
    spec: &'static [(&'static str, usize)],
) -> impl Strategy<Value = IndexedTensor> {
    let total: usize = spec.iter().map(|(_, s)| *s).product();
    prop::collection::vec(complex_strategy(), total).prop_map(move |v| {
        let mut it = v.into_iter();
        IndexedTensor::scalar_from_fn(spec, |_| it.next().unwrap()).unwrap()
    })
}

proptest! {
    #[test]
    fn dagger_reverses_products(a in matrix_strategy(3, 3), b in matrix_strategy(3, 3)) {
        let lhs = a.matmul(&b).unwrap().dagger();
        let rhs = b.dagger().matmul(&a.dagger()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn kron_is_associative_and_bilinear(
        a in matrix_strategy(2, 2),
        b in matrix_strategy(2, 2),
        d in matrix_strategy(2, 2),
    ) {
        let assoc_l = a.kron(&b.kron(&d));
        let assoc_r = a.kron(&b).kron(&d);
        prop_assert!(assoc_l.max_abs_diff(&assoc_r).unwrap() < 1e-12);

        let lin_l = a.add(&b).unwrap().kron(&d);
        let lin_r = a.kron(&d).add(&b.kron(&d)).unwrap();
        prop_assert!(lin_l.max_abs_diff(&lin_r).unwrap() < 1e-12);
    }

    #[test]
    fn unitarity_survives_global_phase(theta in 0.0f64..std::f64::consts::TAU) {
        let h = qverify::numerics::hadamard2();
        let phased = h.scale(c(theta.cos(), theta.sin()));
        prop_assert!(phased.is_unitary(1e-12).unwrap());
    }

    #[test]
    fn projector_algebra_on_random_tensors(
        t in scalar_tensor_strategy(&[("i", 3), ("j", 3), ("x", 2)]),
    ) {
        let ps = t.apply_ps("i", "j").unwrap();
        let pd = t.apply_pd("i", "j").unwrap();
        // idempotent, annihilating, summing to the identity
        prop_assert!(tensors_equal(&ps.apply_ps("i", "j").unwrap(), &ps, 0.0).unwrap().equal);
        prop_assert!(tensors_equal(&pd.apply_pd("i", "j").unwrap(), &pd, 0.0).unwrap().equal);
        let dead = ps.apply_pd("i", "j").unwrap();
        for a in dead.assignments() {
            prop_assert_eq!(dead.component(&a).get(0, 0), Complex64::ZERO);
        }
        prop_assert!(tensors_equal(&ps.tensor_add(&pd).unwrap(), &t, 0.0).unwrap().equal);
    }

    #[test]
    fn composition_is_associative(
        a in matrix_strategy(2, 1).prop_map(|m| tensor_of(m, "x")),
        b in matrix_strategy(3, 2).prop_map(|m| tensor_of(m, "y")),
        d in matrix_strategy(1, 3).prop_map(|m| tensor_of(m, "z")),
    ) {
        let left = a.compose_quantum(&b, &[]).unwrap().compose_quantum(&d, &[]).unwrap();
        let right = a.compose_quantum(&b.compose_quantum(&d, &[]).unwrap(), &[]).unwrap();
        prop_assert!(tensors_equal(&left, &right, 1e-12).unwrap().equal);
    }

    #[test]
    fn spider_trees_fuse(extra_legs in 1usize..4, size in 2usize..5) {
        // a chain of two spiders closed over the shared leg equals one spider
        let region = ClassicalSystem::new("r", size).unwrap();
        let left_names: Vec<String> = (0..extra_legs).map(|i| format!("l{i}")).collect();
        let mut names: Vec<&str> = left_names.iter().map(String::as_str).collect();
        names.push("mid");
        let left = spider_named(&region, &names).unwrap();
        let right = spider_named(&region, &["mid2", "r0", "r1"]).unwrap();
        let fused = left
            .compose_quantum(&right, &[("mid", "mid2")])
            .unwrap()
            .close_index("mid")
            .unwrap();
        let mut all_names = left_names.clone();
        all_names.push("r0".into());
        all_names.push("r1".into());
        let refs: Vec<&str> = all_names.iter().map(String::as_str).collect();
        let want = spider_named(&region, &refs).unwrap();
        prop_assert!(tensors_equal(&fused, &want, 0.0).unwrap().equal);
    }

    #[test]
    fn extract_phase_roundtrip(
        template in scalar_tensor_strategy(&[("a", 3), ("b", 2)]),
        thetas in prop::collection::vec(0.0f64..std::f64::consts::TAU, 6),
    ) {
        // scale each component far enough from zero for a stable ratio
        let template = template.tensor_add(
            &IndexedTensor::scalar_from_fn(&[("a", 3), ("b", 2)], |_| c(2.0, 0.0)).unwrap(),
        ).unwrap();
        let lhs = IndexedTensor::scalar_from_fn(&[("a", 3), ("b", 2)], |assign| {
            let theta = thetas[assign[0] * 2 + assign[1]];
            template.component(assign).get(0, 0) * c(theta.cos(), theta.sin())
        }).unwrap();
        let ext = extract_phase(&lhs, &template, |_| true, 1e-9).unwrap();
        prop_assert!(ext.proportional && ext.all_unit_modulus);
        for assign in lhs.assignments() {
            let theta = thetas[assign[0] * 2 + assign[1]];
            let want = c(theta.cos(), theta.sin());
            prop_assert!((ext.phase.value(&assign) - want).norm() < 1e-9);
        }
    }
}

fn tensor_of(m: ComplexMatrix, index: &str) -> IndexedTensor {
    IndexedTensor::from_fn(&[(index, 2)], m.rows(), m.cols(), |_| m.clone()).unwrap()
}
