mod common;

use proptest::test_runner::TestRunner;
use qmac_core::witness::shift_witness;

#[test]
fn povm_completeness() {
    common::povm_completeness_property(&mut TestRunner::default()).unwrap();
}

#[test]
fn mac_normalization() {
    common::mac_normalization_property(&mut TestRunner::default()).unwrap();
}

#[test]
fn mixture_linearity_is_exact() {
    common::mixture_linearity_property(&mut TestRunner::default()).unwrap();
}

#[test]
fn simplex_certificates_resubstitute() {
    common::certificate_property(&mut TestRunner::default()).unwrap();
}

#[test]
fn decode_decomposition_matches_split_search() {
    let tuples = common::random_shift_tuples(100, 7);
    common::decomposition_matches_oracle(&shift_witness(), &tuples).unwrap();
}

mod strategy_properties {
    use super::common::deterministic_strategy;
    use num_traits::Zero;
    use proptest::prelude::*;
    use qmac_core::mac::MacShape;
    use qmac_core::membership::mac_membership;
    use qmac_core::strategies::{
        mixture_to_mac, strategy_to_mac, zero_compatible_filter, DeterministicStrategy, StrategyMixture,
        StrategySpace,
    };
    use qmac_core::witness::{classical_bound, witness_value_exact, Witness};
    use qmac_core::Rational;

    proptest! {
        #[test]
        fn compact_form_round_trips(s in deterministic_strategy(vec![4, 3, 2], 5)) {
            let back: DeterministicStrategy = s.to_string().parse().unwrap();
            prop_assert_eq!(back, s);
        }

        #[test]
        fn normalizing_keeps_the_channel(s in deterministic_strategy(vec![3, 4], 4)) {
            let shape = MacShape::new(vec![3, 4], 4).unwrap();
            let n = s.normalized();
            prop_assert!(n.is_normalized());
            prop_assert_eq!(
                strategy_to_mac(&s, &shape).unwrap().exact_eq(&strategy_to_mac(&n, &shape).unwrap()),
                Some(true)
            );
        }

        #[test]
        fn bound_dominates_every_strategy(
            s in deterministic_strategy(vec![3, 3], 2),
            coefficients in prop::collection::vec(-9i64..10, 18),
        ) {
            let shape = MacShape::new(vec![3, 3], 2).unwrap();
            let w = Witness::from_integers("w", shape.clone(), &coefficients).unwrap();
            let (bound, arg) = classical_bound(&w).unwrap();
            let value = witness_value_exact(&w, &strategy_to_mac(&s, &shape).unwrap()).unwrap().unwrap();
            prop_assert!(value <= bound);
            let attained = witness_value_exact(&w, &strategy_to_mac(&arg, &shape).unwrap()).unwrap().unwrap();
            prop_assert_eq!(attained, bound);
        }

        #[test]
        fn random_mixtures_are_members(
            picks in prop::collection::vec((deterministic_strategy(vec![2, 3], 3), 1i64..9), 1..5),
        ) {
            let shape = MacShape::new(vec![2, 3], 3).unwrap();
            let total: i64 = picks.iter().map(|(_, w)| w).sum();
            let mix = StrategyMixture::new(
                picks.iter().map(|(s, w)| (s.clone(), Rational::new((*w).into(), total.into()))).collect(),
            ).unwrap();
            let target = mixture_to_mac(&mix, &shape).unwrap();
            let columns = zero_compatible_filter(&target, false).unwrap();
            for (s, _) in &picks {
                prop_assert!(columns.contains(s));
            }
            prop_assert!(mac_membership(&target, &columns).unwrap().is_feasible());
        }

        #[test]
        fn filter_matches_brute_force(
            picks in prop::collection::vec(deterministic_strategy(vec![2, 2], 2), 1..4),
        ) {
            let shape = MacShape::new(vec![2, 2], 2).unwrap();
            let target = mixture_to_mac(&StrategyMixture::uniform(picks).unwrap(), &shape).unwrap();
            let fast = zero_compatible_filter(&target, false).unwrap();
            let exact = target.exact().unwrap();
            let slow: Vec<_> = StrategySpace::new(&shape)
                .iter()
                .filter(|s| {
                    let m = strategy_to_mac(s, &shape).unwrap();
                    m.exact().unwrap().iter().zip(exact).all(|(p, t)| p.is_zero() || !t.is_zero())
                })
                .collect();
            prop_assert_eq!(fast, slow);
        }
    }
}

mod linalg_properties {
    use super::common::{qubit_ket, random_basis};
    use proptest::prelude::*;
    use qmac_core::linalg::{projector, tensor_product, DensityOperator, Ket, Operator};

    proptest! {
        #[test]
        fn tensor_of_states_is_normalized(a in qubit_ket(), b in qubit_ket(), c in qubit_ket()) {
            let k: Ket = tensor_product(&tensor_product(&a, &b), &c);
            prop_assert_eq!(k.dim(), 8);
            prop_assert!(k.is_normalized());
        }

        #[test]
        fn tensor_respects_products(a in qubit_ket(), b in qubit_ket(), c in qubit_ket(), d in qubit_ket()) {
            // ⟨a⊗b|c⊗d⟩ = ⟨a|c⟩⟨b|d⟩
            let lhs = tensor_product(&a, &b).inner(&tensor_product(&c, &d)).unwrap();
            let rhs = a.inner(&c).unwrap() * b.inner(&d).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-12);
        }

        #[test]
        fn projectors_are_idempotent(basis in random_basis(4)) {
            for k in &basis {
                let p = projector(k, true).unwrap();
                prop_assert!(p.matmul(&p).unwrap().max_abs_diff(&p).unwrap() <= 1e-12);
                prop_assert!(p.hermiticity_deviation() <= 1e-12);
                let rho = DensityOperator::pure(k).unwrap();
                prop_assert!(rho.matrix().is_positive_semidefinite(1e-12));
            }
            let id = Operator::identity(4);
            prop_assert!(id.hermiticity_deviation() == 0.0);
        }
    }
}
