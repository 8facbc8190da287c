mod common;

use common::*;
use num_complex::Complex64 as C;
use proptest::prelude::*;

use dcqs::pauli::{PauliString, PauliSum};

fn letters_strategy(n: usize) -> impl Strategy<Value = Vec<(usize, char)>> {
    proptest::collection::vec(prop_oneof![Just('I'), Just('X'), Just('Y'), Just('Z')], n)
        .prop_map(|v| v.into_iter().enumerate().filter(|(_, c)| *c != 'I').collect())
}

fn coef() -> impl Strategy<Value = C> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| C::new(a, b))
}

fn sum_strategy(n: usize, max_terms: usize) -> impl Strategy<Value = PauliSum> {
    proptest::collection::vec((letters_strategy(n), coef()), 0..max_terms).prop_map(move |terms| {
        PauliSum::from_strings(
            n,
            terms.into_iter().map(|(l, c)| PauliString::from_letters(n, &l).unwrap().with_coefficient(c)),
        )
        .unwrap()
    })
}

#[test]
fn single_qubit_products_match_matrices() {
    let (x, z) = (PauliString::parse(1, "X0").unwrap(), PauliString::parse(1, "Z0").unwrap());
    let xz = x.multiply(&z).unwrap();
    assert_eq!(xz.to_string(), "Y0");
    assert_eq!(xz.coefficient, C::new(0.0, -1.0));
    assert!(max_abs_diff(&dense_string(&xz), &matmul(&single('X'), &single('Z'))) < 1e-15);
    let zx = z.multiply(&x).unwrap();
    assert_eq!(zx.coefficient, C::new(0.0, 1.0));
    let xx = x.multiply(&x).unwrap();
    assert_eq!((xx.to_string(), xx.coefficient), ("I".to_string(), C::new(1.0, 0.0)));
}

#[test]
fn two_qubit_commutator() {
    let a = PauliSum::from_strings(2, [PauliString::parse(2, "X0").unwrap()]).unwrap();
    let b = PauliSum::from_strings(2, [PauliString::parse(2, "Z0 Z1").unwrap()]).unwrap();
    let c = a.commutator(&b).unwrap();
    assert_eq!(c.len(), 1);
    let s = c.strings().next().unwrap();
    assert_eq!((s.to_string(), s.coefficient), ("Y0 Z1".to_string(), C::new(0.0, -2.0)));
    assert!(max_abs_diff(&dense_sum(&c), &commutator(&dense_sum(&a), &dense_sum(&b))) < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn string_product_matches_dense(
        (n, a, b) in (1usize..5).prop_flat_map(|n| (Just(n), letters_strategy(n), letters_strategy(n))),
        ca in coef(),
        cb in coef(),
    ) {
        let pa = PauliString::from_letters(n, &a).unwrap().with_coefficient(ca);
        let pb = PauliString::from_letters(n, &b).unwrap().with_coefficient(cb);
        let prod = pa.multiply(&pb).unwrap();
        let dense = matmul(&dense_string(&pa), &dense_string(&pb));
        prop_assert!(max_abs_diff(&dense_string(&prod), &dense) < 1e-13);
    }

    #[test]
    fn commutator_matches_dense(a in sum_strategy(3, 6), b in sum_strategy(3, 6)) {
        let c = a.commutator(&b).unwrap();
        let dense = commutator(&dense_sum(&a), &dense_sum(&b));
        prop_assert!(max_abs_diff(&dense_sum(&c), &dense) < 1e-12);
        prop_assert!(c.iter().all(|(_, v)| v.norm() >= c.threshold()));
    }

    #[test]
    fn commutator_is_antisymmetric(a in sum_strategy(4, 6), b in sum_strategy(4, 6)) {
        let ab = a.commutator(&b).unwrap();
        let ba = b.commutator(&a).unwrap();
        prop_assert!(ab.add(&ba).unwrap().iter().all(|(_, v)| v.norm() < 1e-12));
        prop_assert!(a.commutator(&a).unwrap().is_empty());
    }

    #[test]
    fn hs_inner_matches_trace(a in sum_strategy(3, 5), b in sum_strategy(3, 5)) {
        let symbolic = a.hs_inner(&b).unwrap();
        let dense = frobenius(&dense_sum(&a), &dense_sum(&b)) / 8.0;
        prop_assert!((symbolic - dense).norm() < 1e-12);
        prop_assert!((a.norm_sq() - a.hs_inner(&a).unwrap().re).abs() < 1e-12);
    }

    #[test]
    fn addition_commutes_and_associates(a in sum_strategy(3, 5), b in sum_strategy(3, 5), c in sum_strategy(3, 5)) {
        let ab = a.add(&b).unwrap();
        prop_assert!(max_abs_diff(&dense_sum(&ab), &dense_sum(&b.add(&a).unwrap())) < 1e-14);
        let left = ab.add(&c).unwrap();
        let right = a.add(&b.add(&c).unwrap()).unwrap();
        prop_assert!(max_abs_diff(&dense_sum(&left), &dense_sum(&right)) < 1e-13);
    }
}
