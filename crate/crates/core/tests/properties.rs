use locc_core::concurrence::{concurrence_mixed, e2_mixed};
use locc_core::decomposition::{ensemble_average, wootters_decomposition, Monotone};
use locc_core::feasibility::{max_prob_mixed, mixed_feasible};
use locc_core::protocol::{random_protocol, simulate_exact_density, validate_protocol};
use locc_core::random::{ginibre_density, haar_pure, random_unitary, seeded_rng};
use locc_core::states::{concurrence_pure, e2_pure, schmidt};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn concurrence_is_local_unitary_invariant(seed in any::<u64>(), rank in 1usize..=4) {
        let mut rng = seeded_rng(seed);
        let rho = ginibre_density(&mut rng, rank);
        let (a, b) = (random_unitary(&mut rng, 2), random_unitary(&mut rng, 2));
        let c = concurrence_mixed(&rho).concurrence;
        prop_assert!((0.0..=1.0).contains(&c));
        let moved = concurrence_mixed(&rho.apply_local_unitary(&a, &b)).concurrence;
        prop_assert!((c - moved).abs() < 1e-9, "{} vs {}", c, moved);
    }

    #[test]
    fn schmidt_form_reconstructs(seed in any::<u64>()) {
        let psi = haar_pure(&mut seeded_rng(seed));
        let s = schmidt(&psi);
        prop_assert!(s.lambda1 >= s.lambda2 && s.lambda2 >= 0.0);
        prop_assert!((s.lambda1 + s.lambda2 - 1.0).abs() < 1e-12);
        prop_assert!((s.lambda2 - e2_pure(&psi)).abs() < 1e-12);
        prop_assert!(s.reconstruct().overlap(&psi) > 1.0 - 1e-12);
    }

    #[test]
    fn optimal_ensemble_is_flat(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = ginibre_density(&mut seeded_rng(seed), rank);
        let e = wootters_decomposition(&rho).unwrap();
        let c = concurrence_mixed(&rho).concurrence;
        prop_assert!(e.len() <= 4);
        prop_assert!(e.reconstruction_residual(&rho) < 1e-9);
        for (_, psi) in e.members() {
            prop_assert!((concurrence_pure(psi) - c).abs() < 1e-7);
        }
        prop_assert!((ensemble_average(&e, Monotone::E2) - e2_mixed(&rho)).abs() < 1e-9);
    }

    #[test]
    fn protocols_preserve_trace_and_do_not_raise_e2(seed in any::<u64>(), stages in 1usize..=3) {
        let mut rng = seeded_rng(seed);
        let proto = random_protocol(&mut rng, stages);
        prop_assert!(validate_protocol(&proto).is_valid());
        let rho = ginibre_density(&mut rng, 1 + (seed % 4) as usize);
        let sim = simulate_exact_density(&proto, &rho).unwrap();
        prop_assert!((sim.total_probability() - 1.0).abs() < 1e-9);
        let after: f64 = sim.branches.iter().map(|b| b.probability * e2_mixed(&b.output)).sum();
        prop_assert!(after <= e2_mixed(&rho) + 1e-7);
    }

    #[test]
    fn max_probability_is_one_exactly_when_feasible(seed in any::<u64>(), rank in 1usize..=4) {
        let mut rng = seeded_rng(seed);
        let psi = haar_pure(&mut rng);
        let rho = ginibre_density(&mut rng, rank);
        let p = max_prob_mixed(&psi, &rho);
        prop_assert!((0.0..=1.0).contains(&p));
        if mixed_feasible(&psi, &rho).feasible {
            prop_assert_eq!(p, 1.0);
        } else {
            prop_assert!(p < 1.0);
        }
    }
}
