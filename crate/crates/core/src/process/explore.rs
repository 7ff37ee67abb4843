use std::collections::{HashMap, VecDeque};
use std::fmt::Display;
use std::hash::Hash;

use crate::futs::{Continuation, FutsModel, Partition, RelationSchema, StateId};
use crate::semiring::{FiniteSupportFn, Rational};

use super::SemanticsError;

pub const DEFAULT_STATE_CAP: usize = 10_000;

/// A continuation whose keys are terms rather than state ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermContinuation<T> {
    Bool(FiniteSupportFn<T, bool>),
    Rational(FiniteSupportFn<T, Rational>),
}

impl<T: Ord + Clone> TermContinuation<T> {
    fn targets(&self) -> Vec<T> {
        match self {
            TermContinuation::Bool(f) => f.support().cloned().collect(),
            TermContinuation::Rational(f) => f.support().cloned().collect(),
        }
    }

    fn to_ids(&self, index: &HashMap<T, StateId>) -> Continuation
    where
        T: Hash,
    {
        match self {
            TermContinuation::Bool(f) => Continuation::Bool(f.map_keys(|t| index[t])),
            TermContinuation::Rational(f) => Continuation::Rational(f.map_keys(|t| index[t])),
        }
    }
}

impl<T> From<FiniteSupportFn<T, bool>> for TermContinuation<T> {
    fn from(f: FiniteSupportFn<T, bool>) -> Self {
        TermContinuation::Bool(f)
    }
}

impl<T> From<FiniteSupportFn<T, Rational>> for TermContinuation<T> {
    fn from(f: FiniteSupportFn<T, Rational>) -> Self {
        TermContinuation::Rational(f)
    }
}

/// States discovered by breadth-first search, in discovery order.
#[derive(Debug, Clone)]
pub struct Reachable<T> {
    pub terms: Vec<T>,
    pub index: HashMap<T, StateId>,
}

/// Breadth-first closure of `roots` under `successors`.
///
/// Fails once more than `cap` states have been discovered.
pub fn reachable<T, F>(
    roots: &[T],
    cap: usize,
    mut successors: F,
) -> Result<Reachable<T>, SemanticsError>
where
    T: Clone + Eq + Hash,
    F: FnMut(StateId, &T) -> Result<Vec<T>, SemanticsError>,
{
    let mut terms: Vec<T> = Vec::new();
    let mut index: HashMap<T, StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut discover = |t: &T, terms: &mut Vec<T>, queue: &mut VecDeque<StateId>| {
        if index.contains_key(t) {
            return Ok(());
        }
        if terms.len() >= cap {
            return Err(SemanticsError::StateCapExceeded {
                cap,
                explored: terms.len(),
            });
        }
        index.insert(t.clone(), terms.len());
        queue.push_back(terms.len());
        terms.push(t.clone());
        Ok(())
    };
    for r in roots {
        discover(r, &mut terms, &mut queue)?;
    }
    while let Some(s) = queue.pop_front() {
        let current = terms[s].clone();
        for t in successors(s, &current)? {
            discover(&t, &mut terms, &mut queue)?;
        }
    }
    Ok(Reachable { terms, index })
}

/// An explored FuTS together with the term behind each state.
#[derive(Debug, Clone)]
pub struct Explored<T> {
    pub model: FutsModel,
    pub terms: Vec<T>,
    index: HashMap<T, StateId>,
}

impl<T: Clone + Ord + Hash + Display> Explored<T> {
    /// Explores every term reachable from `roots` through the supports of
    /// `step`, which is asked for each relation and label of `schemas`.
    pub fn build<F>(
        roots: &[T],
        cap: usize,
        schemas: Vec<RelationSchema>,
        mut step: F,
    ) -> Result<Self, SemanticsError>
    where
        F: FnMut(&RelationSchema, &T, &str) -> Result<TermContinuation<T>, SemanticsError>,
    {
        let mut rows: Vec<Vec<TermContinuation<T>>> = Vec::new();
        let reach = reachable(roots, cap, |_, t| {
            let mut targets = Vec::new();
            let mut state_rows = Vec::new();
            for schema in &schemas {
                for label in &schema.labels {
                    let cont = step(schema, t, label)?;
                    targets.extend(cont.targets());
                    state_rows.push(cont);
                }
            }
            rows.push(state_rows);
            Ok(targets)
        })?;
        let Reachable { terms, index } = reach;
        let names = terms.iter().map(|t| t.to_string()).collect();
        let offsets: Vec<usize> = schemas
            .iter()
            .scan(0, |acc, s| {
                let start = *acc;
                *acc += s.labels.len();
                Some(start)
            })
            .collect();
        let positions: Vec<HashMap<&str, usize>> = schemas
            .iter()
            .map(|s| {
                s.labels
                    .iter()
                    .enumerate()
                    .map(|(i, l)| (l.as_str(), i))
                    .collect()
            })
            .collect();
        let relation_of: HashMap<usize, usize> = schemas
            .iter()
            .enumerate()
            .map(|(r, s)| (s.index, r))
            .collect();
        let model = FutsModel::build(names, schemas.clone(), |schema, s, label| {
            let r = relation_of[&schema.index];
            let slot = offsets[r] + positions[r][label];
            Ok(rows[s][slot].to_ids(&index))
        })?;
        Ok(Explored {
            model,
            terms,
            index,
        })
    }

    pub fn state_of(&self, term: &T) -> Option<StateId> {
        self.index.get(term).copied()
    }

    pub fn term(&self, s: StateId) -> &T {
        &self.terms[s]
    }

    /// The blocks of `partition` as sorted term sets; see [`term_blocks`].
    pub fn term_blocks(&self, partition: &Partition) -> Vec<Vec<T>> {
        term_blocks(&self.terms, partition)
    }
}

/// Blocks of `partition` with states replaced by `terms`, each block sorted
/// and the blocks sorted, so partitions over differently numbered state
/// spaces compare directly.
pub fn term_blocks<T: Clone + Ord>(terms: &[T], partition: &Partition) -> Vec<Vec<T>> {
    let mut blocks: Vec<Vec<T>> = partition
        .blocks()
        .iter()
        .map(|b| {
            let mut ts: Vec<T> = b.iter().map(|&s| terms[s].clone()).collect();
            ts.sort();
            ts
        })
        .collect();
    blocks.sort();
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reachable_is_breadth_first() {
        let r = reachable(&[0u32], 100, |_, &n| {
            Ok(if n < 6 { vec![n + 1, n + 2] } else { vec![] })
        })
        .unwrap();
        assert_eq!(r.terms, vec![0, 1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(r.index[&5], 5);
    }

    #[test]
    fn cap_is_enforced() {
        let err = reachable(&[0u64], 10, |_, &n| Ok(vec![n + 1])).unwrap_err();
        assert_eq!(
            err,
            SemanticsError::StateCapExceeded {
                cap: 10,
                explored: 10
            }
        );
        assert!(reachable(&[0u64], 10, |_, &n| Ok(if n < 9 {
            vec![n + 1]
        } else {
            vec![]
        }))
        .is_ok());
    }
}
