//! Labeled state-to-function transition systems.
//!
//! A [`FutsModel`] is a finite, total and deterministic system: for every
//! relation, state and label there is exactly one stored continuation,
//! possibly the zero function.

mod dot;
mod json;
mod oracle;
mod partition;
mod quotient;
mod refine;
mod witness;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::semiring::{
    FiniteSupportFn, Rational, Semiring, SemiringError, SemiringKind, SemiringValue,
};

pub use dot::to_dot;
pub use json::{ModelDocument, RowDocument, SchemaDocument};
pub use oracle::{brute_force_coarsest, ORACLE_STATE_LIMIT};
pub use partition::Partition;
pub use quotient::{is_quotient_homomorphism, quotient};
pub use refine::{coarsest_bisimulation, is_bisimulation, refine, refine_by_signature, Refinement};
pub use witness::{distinguish, Witness};

/// Index of a state within a [`FutsModel`].
pub type StateId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FutsError {
    #[error("relation {0} has an empty label set")]
    EmptyLabels(usize),
    #[error("relation {relation} lists label `{label}` twice")]
    DuplicateLabel { relation: usize, label: String },
    #[error("relation index {0} is used twice")]
    DuplicateRelation(usize),
    #[error("relation index must be positive")]
    ZeroRelationIndex,
    #[error("state `{0}` is listed twice")]
    DuplicateState(String),
    #[error("open model: continuation of ({relation}, {state}, {label}) mentions unknown state `{target}`")]
    OpenModel {
        relation: usize,
        state: String,
        label: String,
        target: String,
    },
    #[error("relation {relation} is over {expected} but a continuation is over {found}")]
    TagMismatch {
        relation: usize,
        expected: SemiringKind,
        found: SemiringKind,
    },
    #[error("no row for ({relation}, {state}, {label}): the model must be total")]
    MissingRow {
        relation: usize,
        state: String,
        label: String,
    },
    #[error("two rows for ({relation}, {state}, {label}): the model must be deterministic")]
    DuplicateRow {
        relation: usize,
        state: String,
        label: String,
    },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown relation {0}")]
    UnknownRelation(usize),
    #[error("relation {relation} has no label `{label}`")]
    UnknownLabel { relation: usize, label: String },
    #[error("partition does not match the model: {0}")]
    PartitionMismatch(String),
    #[error("partition is not a bisimulation")]
    NotABisimulation,
    #[error("model has {states} states; the brute-force oracle is limited to {limit}")]
    TooLarge { states: usize, limit: usize },
    #[error("oracle produced an inconsistent relation: {0}")]
    OracleInconsistent(String),
    #[error("malformed model document: {0}")]
    Document(String),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
}

/// Label set and semiring of one transition relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationSchema {
    pub index: usize,
    pub labels: Vec<String>,
    pub semiring: SemiringKind,
}

impl RelationSchema {
    pub fn new(index: usize, labels: Vec<String>, semiring: SemiringKind) -> Self {
        RelationSchema {
            index,
            labels,
            semiring,
        }
    }

    pub fn label_position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// A continuation function over the states of a model, tagged by semiring.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Continuation {
    Bool(FiniteSupportFn<StateId, bool>),
    Rational(FiniteSupportFn<StateId, Rational>),
}

impl Continuation {
    pub fn zero(kind: SemiringKind) -> Self {
        match kind {
            SemiringKind::Boolean => Continuation::Bool(FiniteSupportFn::zero()),
            SemiringKind::Rational => Continuation::Rational(FiniteSupportFn::zero()),
        }
    }

    pub fn from_values(
        kind: SemiringKind,
        entries: impl IntoIterator<Item = (StateId, SemiringValue)>,
    ) -> Result<Self, SemiringError> {
        fn collect<R: Semiring>(
            entries: impl IntoIterator<Item = (StateId, SemiringValue)>,
        ) -> Result<FiniteSupportFn<StateId, R>, SemiringError> {
            let mut f = FiniteSupportFn::zero();
            for (t, v) in entries {
                f.add_at(t, &R::from_value(v)?);
            }
            Ok(f)
        }
        Ok(match kind {
            SemiringKind::Boolean => Continuation::Bool(collect(entries)?),
            SemiringKind::Rational => Continuation::Rational(collect(entries)?),
        })
    }

    pub fn kind(&self) -> SemiringKind {
        match self {
            Continuation::Bool(_) => SemiringKind::Boolean,
            Continuation::Rational(_) => SemiringKind::Rational,
        }
    }

    pub fn get(&self, t: StateId) -> SemiringValue {
        match self {
            Continuation::Bool(f) => f.get(&t).into_value(),
            Continuation::Rational(f) => f.get(&t).into_value(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Continuation::Bool(f) => f.is_zero(),
            Continuation::Rational(f) => f.is_zero(),
        }
    }

    pub fn support(&self) -> Vec<StateId> {
        match self {
            Continuation::Bool(f) => f.support().copied().collect(),
            Continuation::Rational(f) => f.support().copied().collect(),
        }
    }

    /// Support entries with their values, in state order.
    pub fn entries(&self) -> Vec<(StateId, SemiringValue)> {
        match self {
            Continuation::Bool(f) => f.iter().map(|(t, v)| (*t, v.into_value())).collect(),
            Continuation::Rational(f) => f
                .iter()
                .map(|(t, v)| (*t, v.clone().into_value()))
                .collect(),
        }
    }

    pub fn total(&self) -> SemiringValue {
        match self {
            Continuation::Bool(f) => f.total().into_value(),
            Continuation::Rational(f) => f.total().into_value(),
        }
    }

    pub fn try_plus(&self, other: &Self) -> Result<Self, SemiringError> {
        match (self, other) {
            (Continuation::Bool(a), Continuation::Bool(b)) => Ok(Continuation::Bool(a.plus(b))),
            (Continuation::Rational(a), Continuation::Rational(b)) => {
                Ok(Continuation::Rational(a.plus(b)))
            }
            _ => Err(SemiringError::Mismatch {
                expected: self.kind(),
                found: other.kind(),
            }),
        }
    }

    /// Sum of the values over the states satisfying `pred`.
    pub fn sum_where(&self, pred: impl FnMut(&StateId) -> bool) -> SemiringValue {
        match self {
            Continuation::Bool(f) => f.sum_where(pred).into_value(),
            Continuation::Rational(f) => f.sum_where(pred).into_value(),
        }
    }

    /// Relabels states through `f`, summing values that land on the same state.
    pub fn map_states(&self, f: impl FnMut(&StateId) -> StateId) -> Self {
        match self {
            Continuation::Bool(g) => Continuation::Bool(g.map_keys(f)),
            Continuation::Rational(g) => Continuation::Rational(g.map_keys(f)),
        }
    }

    /// Non-zero class sums, keyed by block index.
    pub fn class_sums(&self, block_of: &[usize]) -> BTreeMap<usize, SemiringValue> {
        self.map_states(|t| block_of[*t])
            .entries()
            .into_iter()
            .collect()
    }
}

impl From<FiniteSupportFn<StateId, bool>> for Continuation {
    fn from(f: FiniteSupportFn<StateId, bool>) -> Self {
        Continuation::Bool(f)
    }
}

impl From<FiniteSupportFn<StateId, Rational>> for Continuation {
    fn from(f: FiniteSupportFn<StateId, Rational>) -> Self {
        Continuation::Rational(f)
    }
}

/// A finite, total and deterministic FuTS.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FutsModel {
    states: Vec<String>,
    schemas: Vec<RelationSchema>,
    // table[r][state * labels(r) + label]
    table: Vec<Vec<Continuation>>,
}

impl FutsModel {
    /// Materializes the table by asking `evaluator` for every
    /// `(relation, state, label)` triple, checking closure and tags.
    pub fn build<F>(
        states: Vec<String>,
        schemas: Vec<RelationSchema>,
        mut evaluator: F,
    ) -> Result<Self, FutsError>
    where
        F: FnMut(&RelationSchema, StateId, &str) -> Result<Continuation, FutsError>,
    {
        validate_schemas(&schemas)?;
        let mut seen = HashSet::with_capacity(states.len());
        for s in &states {
            if !seen.insert(s.as_str()) {
                return Err(FutsError::DuplicateState(s.clone()));
            }
        }
        let n = states.len();
        let mut table = Vec::with_capacity(schemas.len());
        for schema in &schemas {
            let mut rows = Vec::with_capacity(n * schema.labels.len());
            for (s, name) in states.iter().enumerate() {
                for label in &schema.labels {
                    let cont = evaluator(schema, s, label)?;
                    if cont.kind() != schema.semiring {
                        return Err(FutsError::TagMismatch {
                            relation: schema.index,
                            expected: schema.semiring,
                            found: cont.kind(),
                        });
                    }
                    if let Some(&t) = cont.support().iter().find(|&&t| t >= n) {
                        return Err(FutsError::OpenModel {
                            relation: schema.index,
                            state: name.clone(),
                            label: label.clone(),
                            target: format!("#{t}"),
                        });
                    }
                    rows.push(cont);
                }
            }
            table.push(rows);
        }
        Ok(FutsModel {
            states,
            schemas,
            table,
        })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn schemas(&self) -> &[RelationSchema] {
        &self.schemas
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    pub fn state_index(&self) -> HashMap<&str, StateId> {
        self.states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect()
    }

    /// `θ_r(s)(ℓ)` by relation position and label position.
    pub fn row(&self, relation: usize, state: StateId, label: usize) -> &Continuation {
        let width = self.schemas[relation].labels.len();
        &self.table[relation][state * width + label]
    }

    /// Looks a row up by relation index (as declared in the schema) and label name.
    pub fn row_by_name(
        &self,
        relation: usize,
        state: &str,
        label: &str,
    ) -> Result<&Continuation, FutsError> {
        let r = self
            .schemas
            .iter()
            .position(|s| s.index == relation)
            .ok_or(FutsError::UnknownRelation(relation))?;
        let l = self.schemas[r]
            .label_position(label)
            .ok_or_else(|| FutsError::UnknownLabel {
                relation,
                label: label.to_string(),
            })?;
        let s = self
            .state_id(state)
            .ok_or_else(|| FutsError::UnknownState(state.to_string()))?;
        Ok(self.row(r, s, l))
    }

    /// Every `(relation position, label position)` pair.
    pub fn label_slots(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.schemas
            .iter()
            .enumerate()
            .flat_map(|(r, schema)| (0..schema.labels.len()).map(move |l| (r, l)))
    }

    /// Re-checks the model invariants on the stored table.
    pub fn audit(&self) -> Result<(), FutsError> {
        validate_schemas(&self.schemas)?;
        let n = self.states.len();
        for (r, schema) in self.schemas.iter().enumerate() {
            if self.table[r].len() != n * schema.labels.len() {
                return Err(FutsError::MissingRow {
                    relation: schema.index,
                    state: String::new(),
                    label: String::new(),
                });
            }
            for (k, cont) in self.table[r].iter().enumerate() {
                if cont.kind() != schema.semiring {
                    return Err(FutsError::TagMismatch {
                        relation: schema.index,
                        expected: schema.semiring,
                        found: cont.kind(),
                    });
                }
                if let Some(&t) = cont.support().iter().find(|&&t| t >= n) {
                    return Err(FutsError::OpenModel {
                        relation: schema.index,
                        state: self.states[k / schema.labels.len()].clone(),
                        label: schema.labels[k % schema.labels.len()].clone(),
                        target: format!("#{t}"),
                    });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for FutsModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} states", self.states.len())?;
        for (r, schema) in self.schemas.iter().enumerate() {
            writeln!(
                f,
                "relation {} over {} labels {{{}}}",
                schema.index,
                schema.semiring,
                schema.labels.join(", ")
            )?;
            for s in 0..self.states.len() {
                for (l, label) in schema.labels.iter().enumerate() {
                    let row = self.row(r, s, l);
                    if row.is_zero() {
                        continue;
                    }
                    let entries: Vec<String> = row
                        .entries()
                        .into_iter()
                        .map(|(t, v)| format!("{} -> {}", self.states[t], v))
                        .collect();
                    writeln!(
                        f,
                        "  {} --{}--> [{}]",
                        self.states[s],
                        label,
                        entries.join(", ")
                    )?;
                }
            }
        }
        Ok(())
    }
}

fn validate_schemas(schemas: &[RelationSchema]) -> Result<(), FutsError> {
    let mut indices = HashSet::new();
    for schema in schemas {
        if schema.index == 0 {
            return Err(FutsError::ZeroRelationIndex);
        }
        if !indices.insert(schema.index) {
            return Err(FutsError::DuplicateRelation(schema.index));
        }
        if schema.labels.is_empty() {
            return Err(FutsError::EmptyLabels(schema.index));
        }
        let mut labels = HashSet::new();
        for label in &schema.labels {
            if !labels.insert(label.as_str()) {
                return Err(FutsError::DuplicateLabel {
                    relation: schema.index,
                    label: label.clone(),
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_relation(kind: SemiringKind) -> Vec<RelationSchema> {
        vec![RelationSchema::new(1, vec!["a".into()], kind)]
    }

    #[test]
    fn deadlock_state() {
        let m = FutsModel::build(
            vec!["s".into()],
            one_relation(SemiringKind::Rational),
            |schema, _, _| Ok(Continuation::zero(schema.semiring)),
        )
        .unwrap();
        assert_eq!(m.num_states(), 1);
        assert!(m.row(0, 0, 0).is_zero());
    }

    #[test]
    fn two_state_model() {
        let m = FutsModel::build(
            vec!["P".into(), "Q".into()],
            one_relation(SemiringKind::Rational),
            |_, s, _| {
                Ok(if s == 0 {
                    FiniteSupportFn::point(1, Rational::one()).into()
                } else {
                    Continuation::zero(SemiringKind::Rational)
                })
            },
        )
        .unwrap();
        assert_eq!(
            m.row(0, 0, 0).get(1),
            SemiringValue::Rational(Rational::one())
        );
        assert!(m.row(0, 1, 0).is_zero());
        m.audit().unwrap();
    }

    #[test]
    fn support_outside_states_is_open() {
        let err = FutsModel::build(
            vec!["P".into()],
            one_relation(SemiringKind::Boolean),
            |_, _, _| Ok(FiniteSupportFn::point(7, true).into()),
        )
        .unwrap_err();
        assert!(matches!(err, FutsError::OpenModel { .. }));
    }

    #[test]
    fn tag_mismatch() {
        let err = FutsModel::build(
            vec!["P".into()],
            one_relation(SemiringKind::Boolean),
            |_, _, _| Ok(Continuation::zero(SemiringKind::Rational)),
        )
        .unwrap_err();
        assert!(matches!(err, FutsError::TagMismatch { .. }));
    }

    #[test]
    fn schema_validation() {
        let zero = |s: &RelationSchema, _: StateId, _: &str| Ok(Continuation::zero(s.semiring));
        let empty = vec![RelationSchema::new(1, vec![], SemiringKind::Boolean)];
        assert_eq!(
            FutsModel::build(vec![], empty, zero).unwrap_err(),
            FutsError::EmptyLabels(1)
        );
        let dup = vec![RelationSchema::new(
            1,
            vec!["a".into(), "a".into()],
            SemiringKind::Boolean,
        )];
        assert!(matches!(
            FutsModel::build(vec![], dup, zero).unwrap_err(),
            FutsError::DuplicateLabel { .. }
        ));
        let twice = vec![
            RelationSchema::new(1, vec!["a".into()], SemiringKind::Boolean),
            RelationSchema::new(1, vec!["b".into()], SemiringKind::Boolean),
        ];
        assert_eq!(
            FutsModel::build(vec![], twice, zero).unwrap_err(),
            FutsError::DuplicateRelation(1)
        );
        assert!(matches!(
            FutsModel::build(
                vec!["s".into(), "s".into()],
                one_relation(SemiringKind::Boolean),
                zero
            )
            .unwrap_err(),
            FutsError::DuplicateState(_)
        ));
    }

    #[test]
    fn continuation_mismatch_on_add() {
        let b = Continuation::zero(SemiringKind::Boolean);
        let r = Continuation::zero(SemiringKind::Rational);
        assert!(b.try_plus(&r).is_err());
        assert!(b.try_plus(&b).unwrap().is_zero());
    }

    #[test]
    fn class_sums_merge_blocks() {
        let c: Continuation = FiniteSupportFn::from_entries([
            (0usize, Rational::new(1, 2).unwrap()),
            (1, Rational::new(1, 2).unwrap()),
            (2, Rational::one()),
        ])
        .into();
        let sums = c.class_sums(&[0, 0, 1]);
        assert_eq!(sums[&0], SemiringValue::Rational(Rational::one()));
        assert_eq!(sums[&1], SemiringValue::Rational(Rational::one()));
    }
}
