use std::collections::HashSet;
use std::fmt;

use crate::semiring::SemiringValue;

use super::{FutsModel, Partition, StateId};

/// Why two states are not bisimilar: a relation, label and class whose
/// class sums differ, optionally followed by the reason a target of one side
/// is not equivalent to a target of the other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub left: StateId,
    pub right: StateId,
    /// Relation index as declared in the schema.
    pub relation: usize,
    pub label: String,
    pub class: Vec<StateId>,
    pub left_value: SemiringValue,
    pub right_value: SemiringValue,
    pub cause: Option<Box<Witness>>,
}

impl Witness {
    /// This step and all nested causes, outermost first.
    pub fn chain(&self) -> Vec<&Witness> {
        let mut out = vec![self];
        let mut cur = self;
        while let Some(next) = &cur.cause {
            out.push(next);
            cur = next;
        }
        out
    }

    pub fn display<'a>(&'a self, model: &'a FutsModel) -> WitnessDisplay<'a> {
        WitnessDisplay {
            witness: self,
            model,
        }
    }
}

pub struct WitnessDisplay<'a> {
    witness: &'a Witness,
    model: &'a FutsModel,
}

impl fmt::Display for WitnessDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (depth, w) in self.witness.chain().into_iter().enumerate() {
            let class: Vec<&str> = w.class.iter().map(|&s| self.model.state_name(s)).collect();
            let lead = if depth == 0 { "witness" } else { "because" };
            writeln!(
                f,
                "{:indent$}{lead}: {} vs {}: relation {}, label {}, class {{{}}}: {} vs {}",
                "",
                self.model.state_name(w.left),
                self.model.state_name(w.right),
                w.relation,
                w.label,
                class.join(", "),
                w.left_value,
                w.right_value,
                indent = depth * 2
            )?;
        }
        Ok(())
    }
}

/// Explains why `left` and `right` fall in different blocks of `partition`.
///
/// `partition` should be the coarsest bisimulation; then any two states in
/// different blocks differ on some class sum. Returns `None` when the two
/// states have identical class sums everywhere.
pub fn distinguish(
    model: &FutsModel,
    partition: &Partition,
    left: StateId,
    right: StateId,
) -> Option<Witness> {
    let block_of = partition.block_map(model.num_states()).ok()?;
    let mut visited = HashSet::new();
    explain(model, partition, &block_of, left, right, &mut visited)
}

fn explain(
    model: &FutsModel,
    partition: &Partition,
    block_of: &[usize],
    left: StateId,
    right: StateId,
    visited: &mut HashSet<(StateId, StateId)>,
) -> Option<Witness> {
    if !visited.insert((left, right)) {
        return None;
    }
    for (r, l) in model.label_slots() {
        let left_row = model.row(r, left, l);
        let right_row = model.row(r, right, l);
        let left_sums = left_row.class_sums(block_of);
        let right_sums = right_row.class_sums(block_of);
        for (b, class) in partition.blocks().iter().enumerate() {
            let zero = model.schemas()[r].semiring.zero();
            let lv = left_sums.get(&b).cloned().unwrap_or_else(|| zero.clone());
            let rv = right_sums.get(&b).cloned().unwrap_or(zero);
            if lv == rv {
                continue;
            }
            // Pair a target inside the class with a target of the other side outside it.
            let (inside, outside_row, inside_is_left) = if !lv.is_zero() {
                (left_row, right_row, true)
            } else {
                (right_row, left_row, false)
            };
            let u = inside.support().into_iter().find(|&t| block_of[t] == b);
            let v = outside_row
                .support()
                .into_iter()
                .find(|&t| block_of[t] != b);
            let cause = match (u, v) {
                (Some(u), Some(v)) => {
                    let (a, c) = if inside_is_left { (u, v) } else { (v, u) };
                    explain(model, partition, block_of, a, c, visited).map(Box::new)
                }
                _ => None,
            };
            return Some(Witness {
                left,
                right,
                relation: model.schemas()[r].index,
                label: model.schemas()[r].labels[l].clone(),
                class: class.clone(),
                left_value: lv,
                right_value: rv,
                cause,
            });
        }
    }
    None
}
