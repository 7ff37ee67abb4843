use std::collections::BTreeMap;

use crate::semiring::SemiringValue;

use super::{FutsError, FutsModel, Partition, StateId};

/// Result of a signature refinement run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refinement {
    pub partition: Partition,
    /// Block count before the first round and after every round.
    pub block_counts: Vec<usize>,
}

impl Refinement {
    pub fn rounds(&self) -> usize {
        self.block_counts.len() - 1
    }
}

/// Splits blocks by `signature(state, block_of)` until nothing changes.
///
/// Starts from a single block. Two states stay together only if they were
/// together in the previous round and have equal signatures, so blocks only
/// ever split and an unchanged block count means a fixed point.
pub fn refine_by_signature<S, F>(n: usize, mut signature: F) -> Refinement
where
    S: Ord,
    F: FnMut(StateId, &[usize]) -> S,
{
    let mut block_of = vec![0usize; n];
    let mut count = usize::from(n > 0);
    let mut block_counts = vec![count];
    loop {
        let mut ids: BTreeMap<(usize, S), usize> = BTreeMap::new();
        let mut keyed = Vec::with_capacity(n);
        for s in 0..n {
            let key = (block_of[s], signature(s, &block_of));
            let next = ids.len();
            let id = *ids.entry(key).or_insert(next);
            keyed.push(id);
        }
        let new_count = ids.len();
        block_counts.push(new_count);
        block_of = keyed;
        if new_count == count {
            break;
        }
        count = new_count;
    }
    Refinement {
        partition: Partition::from_block_map(&block_of),
        block_counts,
    }
}

/// Class-summed row signature: `(relation, label, block) -> Σ_{t ∈ block} θ(s)(ℓ)(t)`.
pub(crate) fn futs_signature(
    model: &FutsModel,
    s: StateId,
    block_of: &[usize],
) -> BTreeMap<(usize, usize, usize), SemiringValue> {
    let mut sig = BTreeMap::new();
    for (r, l) in model.label_slots() {
        for (block, value) in model.row(r, s, l).class_sums(block_of) {
            sig.insert((r, l, block), value);
        }
    }
    sig
}

pub fn refine(model: &FutsModel) -> Refinement {
    refine_by_signature(model.num_states(), |s, block_of| {
        futs_signature(model, s, block_of)
    })
}

/// The coarsest bisimulation of `model`, by partition refinement.
pub fn coarsest_bisimulation(model: &FutsModel) -> Partition {
    refine(model).partition
}

/// Checks that all members of every block have equal class sums
/// `Σ_{t' ∈ C} θ_i(s)(ℓ)(t')` for every relation, label and class `C`.
pub fn is_bisimulation(model: &FutsModel, partition: &Partition) -> Result<bool, FutsError> {
    let block_of = partition.block_map(model.num_states())?;
    for block in partition.blocks() {
        let (&first, rest) = block.split_first().expect("blocks are non-empty");
        let expected = futs_signature(model, first, &block_of);
        if rest
            .iter()
            .any(|&other| futs_signature(model, other, &block_of) != expected)
        {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::futs::{Continuation, RelationSchema};
    use crate::semiring::{FiniteSupportFn, Rational, SemiringKind};

    fn rational_model(rows: &[&[(usize, u64)]]) -> FutsModel {
        let states = (0..rows.len()).map(|i| format!("s{i}")).collect();
        FutsModel::build(
            states,
            vec![RelationSchema::new(
                1,
                vec!["a".into()],
                SemiringKind::Rational,
            )],
            |_, s, _| {
                Ok(Continuation::Rational(FiniteSupportFn::from_entries(
                    rows[s].iter().map(|&(t, v)| (t, Rational::from_integer(v))),
                )))
            },
        )
        .unwrap()
    }

    #[test]
    fn identity_partition_is_a_bisimulation() {
        let m = rational_model(&[&[(1, 1)], &[(0, 2)], &[]]);
        assert!(is_bisimulation(&m, &Partition::discrete(3)).unwrap());
    }

    #[test]
    fn identical_rows_collapse() {
        let m = rational_model(&[&[(2, 1)], &[(2, 1)], &[]]);
        assert!(is_bisimulation(&m, &Partition::new(vec![vec![0, 1], vec![2]])).unwrap());
        assert_eq!(
            coarsest_bisimulation(&m),
            Partition::new(vec![vec![0, 1], vec![2]])
        );
    }

    #[test]
    fn all_zero_rows_form_one_block() {
        let m = rational_model(&[&[], &[], &[], &[]]);
        assert_eq!(coarsest_bisimulation(&m), Partition::single(4));
    }

    #[test]
    fn class_sums_not_individual_targets() {
        // s0 splits its weight over two equivalent targets; s1 sends it all to one.
        let m = rational_model(&[&[(2, 1), (3, 1)], &[(2, 2)], &[], &[]]);
        let p = coarsest_bisimulation(&m);
        assert_eq!(p, Partition::new(vec![vec![0, 1], vec![2, 3]]));
        assert!(is_bisimulation(&m, &p).unwrap());
    }

    #[test]
    fn rejects_foreign_partition() {
        let m = rational_model(&[&[], &[]]);
        assert!(is_bisimulation(&m, &Partition::discrete(3)).is_err());
    }

    #[test]
    fn block_counts_are_monotone() {
        let m = rational_model(&[&[(1, 1)], &[(2, 1)], &[(3, 1)], &[]]);
        let r = refine(&m);
        assert!(r.block_counts.windows(2).all(|w| w[0] <= w[1]));
        assert!(r.rounds() <= m.num_states());
        assert_eq!(r.partition, Partition::discrete(4));
    }
}
