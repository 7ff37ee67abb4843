use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::semiring::{SemiringKind, SemiringValue};

use super::{Continuation, FutsError, FutsModel, RelationSchema};

/// JSON form of a model.
///
/// ```json
/// {"schemas":[{"index":1,"labels":["a"],"semiring":"rational"}],
///  "states":["P","Q"],
///  "rows":[{"rel":1,"state":"P","label":"a","cont":{"Q":"1/1"}},
///          {"rel":1,"state":"Q","label":"a","cont":{}}]}
/// ```
///
/// Every `(rel, state, label)` triple needs exactly one row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub schemas: Vec<SchemaDocument>,
    pub states: Vec<String>,
    pub rows: Vec<RowDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemaDocument {
    pub index: usize,
    pub labels: Vec<String>,
    pub semiring: SemiringKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowDocument {
    pub rel: usize,
    pub state: String,
    pub label: String,
    pub cont: BTreeMap<String, SemiringValue>,
}

impl FutsModel {
    pub fn from_json(text: &str) -> Result<Self, FutsError> {
        let doc: ModelDocument =
            serde_json::from_str(text).map_err(|e| FutsError::Document(e.to_string()))?;
        Self::from_document(&doc)
    }

    pub fn from_document(doc: &ModelDocument) -> Result<Self, FutsError> {
        let schemas: Vec<RelationSchema> = doc
            .schemas
            .iter()
            .map(|s| RelationSchema::new(s.index, s.labels.clone(), s.semiring))
            .collect();
        let state_ids: HashMap<&str, usize> = doc
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();

        let mut rows: HashMap<(usize, &str, &str), &RowDocument> = HashMap::new();
        for row in &doc.rows {
            let schema = schemas
                .iter()
                .find(|s| s.index == row.rel)
                .ok_or(FutsError::UnknownRelation(row.rel))?;
            if schema.label_position(&row.label).is_none() {
                return Err(FutsError::UnknownLabel {
                    relation: row.rel,
                    label: row.label.clone(),
                });
            }
            if !state_ids.contains_key(row.state.as_str()) {
                return Err(FutsError::UnknownState(row.state.clone()));
            }
            let key = (row.rel, row.state.as_str(), row.label.as_str());
            if rows.insert(key, row).is_some() {
                return Err(FutsError::DuplicateRow {
                    relation: row.rel,
                    state: row.state.clone(),
                    label: row.label.clone(),
                });
            }
        }

        FutsModel::build(doc.states.clone(), schemas.clone(), |schema, s, label| {
            let state = doc.states[s].as_str();
            let row =
                rows.get(&(schema.index, state, label))
                    .ok_or_else(|| FutsError::MissingRow {
                        relation: schema.index,
                        state: state.to_string(),
                        label: label.to_string(),
                    })?;
            let mut entries = Vec::with_capacity(row.cont.len());
            for (target, value) in &row.cont {
                let t = *state_ids
                    .get(target.as_str())
                    .ok_or_else(|| FutsError::OpenModel {
                        relation: schema.index,
                        state: state.to_string(),
                        label: label.to_string(),
                        target: target.clone(),
                    })?;
                if value.kind() != schema.semiring {
                    return Err(FutsError::TagMismatch {
                        relation: schema.index,
                        expected: schema.semiring,
                        found: value.kind(),
                    });
                }
                entries.push((t, value.clone()));
            }
            Ok(Continuation::from_values(schema.semiring, entries)?)
        })
    }

    pub fn to_document(&self) -> ModelDocument {
        let schemas = self
            .schemas()
            .iter()
            .map(|s| SchemaDocument {
                index: s.index,
                labels: s.labels.clone(),
                semiring: s.semiring,
            })
            .collect();
        let mut rows = Vec::new();
        for (r, schema) in self.schemas().iter().enumerate() {
            for s in 0..self.num_states() {
                for (l, label) in schema.labels.iter().enumerate() {
                    let cont = self
                        .row(r, s, l)
                        .entries()
                        .into_iter()
                        .map(|(t, v)| (self.state_name(t).to_string(), v))
                        .collect();
                    rows.push(RowDocument {
                        rel: schema.index,
                        state: self.state_name(s).to_string(),
                        label: label.clone(),
                        cont,
                    });
                }
            }
        }
        ModelDocument {
            schemas,
            states: self.states().to_vec(),
            rows,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("model documents always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::Rational;

    const TWO_STATE_BOOL: &str = r#"{
        "schemas": [{"index": 1, "labels": ["a"], "semiring": "bool"}],
        "states": ["P", "Q"],
        "rows": [
            {"rel": 1, "state": "P", "label": "a", "cont": {"Q": true}},
            {"rel": 1, "state": "Q", "label": "a", "cont": {}}
        ]
    }"#;

    #[test]
    fn imports_well_formed_document() {
        let m = FutsModel::from_json(TWO_STATE_BOOL).unwrap();
        assert_eq!(m.num_states(), 2);
        assert_eq!(m.row(0, 0, 0).get(1), SemiringValue::Bool(true));
        let again = FutsModel::from_json(&m.to_json()).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn missing_row_breaks_totality() {
        let text = TWO_STATE_BOOL.replace(
            r#",
            {"rel": 1, "state": "Q", "label": "a", "cont": {}}"#,
            "",
        );
        assert!(matches!(
            FutsModel::from_json(&text),
            Err(FutsError::MissingRow { .. })
        ));
    }

    #[test]
    fn duplicate_row_breaks_determinism() {
        let text = TWO_STATE_BOOL.replace(
            r#"{"rel": 1, "state": "Q", "label": "a", "cont": {}}"#,
            r#"{"rel": 1, "state": "Q", "label": "a", "cont": {}},
               {"rel": 1, "state": "Q", "label": "a", "cont": {"P": true}}"#,
        );
        assert!(matches!(
            FutsModel::from_json(&text),
            Err(FutsError::DuplicateRow { .. })
        ));
    }

    #[test]
    fn rejects_bad_documents() {
        let unknown_kind = TWO_STATE_BOOL.replace("\"bool\"", "\"real\"");
        assert!(matches!(
            FutsModel::from_json(&unknown_kind),
            Err(FutsError::Document(_))
        ));
        let open = TWO_STATE_BOOL.replace(r#"{"Q": true}"#, r#"{"R": true}"#);
        assert!(matches!(
            FutsModel::from_json(&open),
            Err(FutsError::OpenModel { .. })
        ));
        let mixed = TWO_STATE_BOOL.replace(r#"{"Q": true}"#, r#"{"Q": "1/2"}"#);
        assert!(matches!(
            FutsModel::from_json(&mixed),
            Err(FutsError::TagMismatch { .. })
        ));
        assert!(matches!(
            FutsModel::from_json("{\"states\": []}"),
            Err(FutsError::Document(_))
        ));
    }

    /// A reactive probabilistic system shaped like a five-state example:
    /// every non-zero row is a distribution.
    #[test]
    fn probabilistic_rows_sum_to_one() {
        let text = r#"{
            "schemas": [{"index": 1, "labels": ["a", "b"], "semiring": "rational"}],
            "states": ["s0", "s1", "s2", "s3", "s4"],
            "rows": [
                {"rel": 1, "state": "s0", "label": "a", "cont": {"s1": "1/2", "s2": "1/2"}},
                {"rel": 1, "state": "s0", "label": "b", "cont": {"s3": "1/3", "s4": "2/3"}},
                {"rel": 1, "state": "s1", "label": "a", "cont": {"s0": "1/1"}},
                {"rel": 1, "state": "s1", "label": "b", "cont": {}},
                {"rel": 1, "state": "s2", "label": "a", "cont": {"s2": "1/4", "s0": "3/4"}},
                {"rel": 1, "state": "s2", "label": "b", "cont": {}},
                {"rel": 1, "state": "s3", "label": "a", "cont": {}},
                {"rel": 1, "state": "s3", "label": "b", "cont": {"s4": "1/1"}},
                {"rel": 1, "state": "s4", "label": "a", "cont": {}},
                {"rel": 1, "state": "s4", "label": "b", "cont": {"s3": "1/1"}}
            ]
        }"#;
        let m = FutsModel::from_json(text).unwrap();
        for (r, l) in m.label_slots() {
            for s in 0..m.num_states() {
                let row = m.row(r, s, l);
                if !row.is_zero() {
                    assert_eq!(row.total(), SemiringValue::Rational(Rational::one()));
                }
            }
        }
    }
}
