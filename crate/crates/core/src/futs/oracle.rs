use super::{FutsError, FutsModel, Partition, StateId};
use crate::semiring::SemiringValue;

/// Largest model the brute-force oracle accepts (Bell(8) = 4140 partitions).
pub const ORACLE_STATE_LIMIT: usize = 8;

/// Bisimilarity straight from the definition: `s1` and `s2` are related iff
/// some partition of the state set that is a bisimulation puts them in one
/// block. Every partition is enumerated.
pub fn brute_force_coarsest(model: &FutsModel) -> Result<Partition, FutsError> {
    let n = model.num_states();
    if n > ORACLE_STATE_LIMIT {
        return Err(FutsError::TooLarge {
            states: n,
            limit: ORACLE_STATE_LIMIT,
        });
    }
    let mut related = vec![vec![false; n]; n];
    for partition in SetPartitions::new(n) {
        if !holds_literally(model, &partition)? {
            continue;
        }
        for block in partition.blocks() {
            for &a in block {
                for &b in block {
                    related[a][b] = true;
                }
            }
        }
    }

    // The union of bisimulations must itself be an equivalence and a bisimulation.
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut assigned = vec![false; n];
    for s in 0..n {
        if assigned[s] {
            continue;
        }
        let class: Vec<usize> = (0..n).filter(|&t| related[s][t]).collect();
        for &t in &class {
            if assigned[t] || (0..n).any(|u| related[t][u] != related[s][u]) {
                return Err(FutsError::OracleInconsistent(format!(
                    "relation is not transitive at states {s} and {t}"
                )));
            }
            assigned[t] = true;
        }
        blocks.push(class);
    }
    let partition = Partition::new(blocks);
    if !holds_literally(model, &partition)? {
        return Err(FutsError::OracleInconsistent(
            "union of bisimulations is not a bisimulation".into(),
        ));
    }
    Ok(partition)
}

/// The bisimulation condition summed class by class: within every block, all
/// members have equal sums `Σ_{t' ∈ C} θ_i(s)(ℓ)(t')` for every relation,
/// label and class `C`.
fn holds_literally(model: &FutsModel, partition: &Partition) -> Result<bool, FutsError> {
    partition.block_map(model.num_states())?;
    let class_sum = |r: usize, s: StateId, l: usize, class: &[StateId]| -> SemiringValue {
        let row = model.row(r, s, l);
        class
            .iter()
            .fold(model.schemas()[r].semiring.zero(), |acc, &t| {
                acc.try_plus(&row.get(t))
                    .expect("row values share the schema semiring")
            })
    };
    for block in partition.blocks() {
        let (&first, rest) = block.split_first().expect("blocks are non-empty");
        for &other in rest {
            for (r, l) in model.label_slots() {
                for class in partition.blocks() {
                    if class_sum(r, first, l, class) != class_sum(r, other, l, class) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Every partition of `0..n`, via restricted growth strings.
struct SetPartitions {
    growth: Vec<usize>,
    done: bool,
}

impl SetPartitions {
    fn new(n: usize) -> Self {
        SetPartitions {
            growth: vec![0; n],
            done: false,
        }
    }

    fn advance(&mut self) {
        let n = self.growth.len();
        // Rightmost position that can still grow: a[i] <= max(a[0..i]).
        for i in (1..n).rev() {
            let max_prefix = self.growth[..i].iter().copied().max().unwrap_or(0);
            if self.growth[i] <= max_prefix {
                self.growth[i] += 1;
                for slot in &mut self.growth[i + 1..] {
                    *slot = 0;
                }
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for SetPartitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let current = Partition::from_block_map(&self.growth);
        self.advance();
        Some(current)
    }
}
