use std::collections::BTreeMap;

use super::{is_bisimulation, FutsError, FutsModel, Partition};
use crate::semiring::SemiringValue;

/// Merges every block of `partition` into one state.
///
/// The state for block `B` is named after its smallest member and its rows
/// are the class-summed rows of that member:
/// `θ'([s])(ℓ)([t]) = Σ_{t' ∈ [t]} θ(s)(ℓ)(t')`. This is only well defined
/// when the partition is a bisimulation, which is checked first.
pub fn quotient(model: &FutsModel, partition: &Partition) -> Result<FutsModel, FutsError> {
    let block_of = partition.block_map(model.num_states())?;
    if !is_bisimulation(model, partition)? {
        return Err(FutsError::NotABisimulation);
    }
    let representatives: Vec<usize> = partition.blocks().iter().map(|b| b[0]).collect();
    let states = representatives
        .iter()
        .map(|&s| model.state_name(s).to_string())
        .collect();
    let schemas = model.schemas().to_vec();
    FutsModel::build(states, schemas, |schema, block, label| {
        let r = model
            .schemas()
            .iter()
            .position(|s| s.index == schema.index)
            .expect("schemas are copied from the model");
        let l = schema.label_position(label).expect("label from schema");
        Ok(model
            .row(r, representatives[block], l)
            .map_states(|t| block_of[*t]))
    })
}

/// Checks `Σ_{t ∈ B} θ(s)(ℓ)(t) = θ'([s])(ℓ)(B)` for every state `s` of the
/// original model, every relation and label, and every block `B`.
pub fn is_quotient_homomorphism(
    model: &FutsModel,
    partition: &Partition,
    quotient: &FutsModel,
) -> bool {
    let Ok(block_of) = partition.block_map(model.num_states()) else {
        return false;
    };
    if quotient.num_states() != partition.len() || quotient.schemas() != model.schemas() {
        return false;
    }
    for s in 0..model.num_states() {
        for (r, l) in model.label_slots() {
            let merged: BTreeMap<usize, SemiringValue> = quotient
                .row(r, block_of[s], l)
                .entries()
                .into_iter()
                .collect();
            if model.row(r, s, l).class_sums(&block_of) != merged {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::futs::{coarsest_bisimulation, Continuation, RelationSchema};
    use crate::semiring::{FiniteSupportFn, Rational, SemiringKind, SemiringValue};

    fn half() -> Rational {
        Rational::new(1, 2).unwrap()
    }

    // root -> {u: 1/2, v: 1/2}; u and v both deadlock.
    fn split_model() -> FutsModel {
        FutsModel::build(
            vec!["root".into(), "u".into(), "v".into()],
            vec![RelationSchema::new(
                1,
                vec!["a".into()],
                SemiringKind::Rational,
            )],
            |_, s, _| {
                Ok(if s == 0 {
                    Continuation::Rational(FiniteSupportFn::from_entries([
                        (1, half()),
                        (2, half()),
                    ]))
                } else {
                    Continuation::zero(SemiringKind::Rational)
                })
            },
        )
        .unwrap()
    }

    #[test]
    fn class_summed_rows() {
        let m = split_model();
        let p = coarsest_bisimulation(&m);
        assert_eq!(p, Partition::new(vec![vec![0], vec![1, 2]]));
        let q = quotient(&m, &p).unwrap();
        assert_eq!(q.states(), &["root".to_string(), "u".to_string()]);
        assert_eq!(
            q.row(0, 0, 0).get(1),
            SemiringValue::Rational(Rational::one())
        );
        assert!(is_quotient_homomorphism(&m, &p, &q));
    }

    #[test]
    fn identity_quotient_is_isomorphic() {
        let m = split_model();
        let q = quotient(&m, &Partition::discrete(3)).unwrap();
        assert_eq!(q, m);
    }

    #[test]
    fn minimal_after_quotient() {
        let m = split_model();
        let q = quotient(&m, &coarsest_bisimulation(&m)).unwrap();
        assert_eq!(
            coarsest_bisimulation(&q),
            Partition::discrete(q.num_states())
        );
    }

    #[test]
    fn requires_bisimulation() {
        let m = split_model();
        assert_eq!(
            quotient(&m, &Partition::single(3)).unwrap_err(),
            FutsError::NotABisimulation
        );
    }
}
