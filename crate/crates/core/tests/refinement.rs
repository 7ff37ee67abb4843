use futs_core::gen::{random_model, rng_from_seed};
use futs_core::{
    brute_force_coarsest, coarsest_bisimulation, distinguish, is_bisimulation,
    is_quotient_homomorphism, quotient, FutsModel,
};
use proptest::prelude::*;

fn model(seed: u64) -> FutsModel {
    random_model(&mut rng_from_seed(seed), 6).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn refinement_matches_brute_force(seed: u64) {
        let m = model(seed);
        prop_assert_eq!(coarsest_bisimulation(&m), brute_force_coarsest(&m).unwrap());
    }

    #[test]
    fn coarsest_partition_is_a_bisimulation(seed: u64) {
        let m = model(seed);
        prop_assert!(is_bisimulation(&m, &coarsest_bisimulation(&m)).unwrap());
    }

    #[test]
    fn quotient_is_homomorphic_and_minimal(seed: u64) {
        let m = model(seed);
        let p = coarsest_bisimulation(&m);
        let q = quotient(&m, &p).unwrap();
        prop_assert!(is_quotient_homomorphism(&m, &p, &q));
        prop_assert_eq!(coarsest_bisimulation(&q).len(), q.num_states());
        let again = quotient(&q, &coarsest_bisimulation(&q)).unwrap();
        prop_assert_eq!(again, q);
    }

    #[test]
    fn separated_states_have_witnesses(seed: u64) {
        let m = model(seed);
        let p = coarsest_bisimulation(&m);
        for s in 0..m.num_states() {
            for t in 0..m.num_states() {
                let w = distinguish(&m, &p, s, t);
                prop_assert_eq!(w.is_some(), !p.same_block(s, t));
                if let Some(w) = w {
                    prop_assert_ne!(w.left_value, w.right_value);
                }
            }
        }
    }

    #[test]
    fn json_round_trip(seed: u64) {
        let m = model(seed);
        prop_assert_eq!(FutsModel::from_json(&m.to_json()).unwrap(), m);
    }
}
