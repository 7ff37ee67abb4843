use std::collections::BTreeMap;
use std::fmt;

use super::{FutsError, FutsModel, StateId};

/// A partition of the states of a model into disjoint non-empty blocks.
///
/// Blocks are kept sorted and ordered by their smallest member, so two
/// partitions of the same state set compare equal iff they relate the same
/// states.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Vec<StateId>>,
}

impl Partition {
    pub fn new(blocks: Vec<Vec<StateId>>) -> Self {
        let mut blocks: Vec<Vec<StateId>> = blocks
            .into_iter()
            .filter(|b| !b.is_empty())
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort_unstable_by_key(|b| b[0]);
        Partition { blocks }
    }

    /// Builds the partition whose block ids are given per state.
    pub fn from_block_map(block_of: &[usize]) -> Self {
        let mut groups: BTreeMap<usize, Vec<StateId>> = BTreeMap::new();
        for (s, &b) in block_of.iter().enumerate() {
            groups.entry(b).or_default().push(s);
        }
        Partition::new(groups.into_values().collect())
    }

    /// All singletons.
    pub fn discrete(n: usize) -> Self {
        Partition {
            blocks: (0..n).map(|s| vec![s]).collect(),
        }
    }

    /// One block holding every state (no blocks when `n` is zero).
    pub fn single(n: usize) -> Self {
        Partition::new(vec![(0..n).collect()])
    }

    pub fn blocks(&self) -> &[Vec<StateId>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Checks that this partitions `0..n` and returns the block index of every state.
    pub fn block_map(&self, n: usize) -> Result<Vec<usize>, FutsError> {
        let mut block_of = vec![usize::MAX; n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &s in block {
                if s >= n {
                    return Err(FutsError::PartitionMismatch(format!(
                        "state #{s} does not exist"
                    )));
                }
                if block_of[s] != usize::MAX {
                    return Err(FutsError::PartitionMismatch(format!(
                        "state #{s} occurs in two blocks"
                    )));
                }
                block_of[s] = b;
            }
        }
        if let Some(s) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(FutsError::PartitionMismatch(format!(
                "state #{s} is not covered"
            )));
        }
        Ok(block_of)
    }

    pub fn block_containing(&self, s: StateId) -> Option<usize> {
        self.blocks.iter().position(|b| b.binary_search(&s).is_ok())
    }

    pub fn same_block(&self, a: StateId, b: StateId) -> bool {
        self.block_containing(a)
            .is_some_and(|i| self.blocks[i].binary_search(&b).is_ok())
    }

    /// Blocks by state name.
    pub fn to_names(&self, model: &FutsModel) -> Vec<Vec<String>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&s| model.state_name(s).to_string()).collect())
            .collect()
    }

    /// Parses blocks given by state name.
    pub fn from_names(model: &FutsModel, blocks: &[Vec<String>]) -> Result<Self, FutsError> {
        let index = model.state_index();
        let blocks = blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|name| {
                        index
                            .get(name.as_str())
                            .copied()
                            .ok_or_else(|| FutsError::UnknownState(name.clone()))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let p = Partition::new(blocks);
        p.block_map(model.num_states())?;
        Ok(p)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{b:?}")?;
        }
        f.write_str("}")
    }
}
