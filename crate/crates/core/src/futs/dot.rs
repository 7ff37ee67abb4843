use std::fmt::Write;

use super::FutsModel;

/// Graphviz rendering with one edge per support entry, labelled `label/value`.
///
/// Edges of relations other than the first are drawn dashed.
pub fn to_dot(model: &FutsModel) -> String {
    let mut out = String::from("digraph futs {\n  rankdir=LR;\n");
    for (s, name) in model.states().iter().enumerate() {
        let _ = writeln!(out, "  s{s} [label=\"{}\"];", escape(name));
    }
    for (r, schema) in model.schemas().iter().enumerate() {
        let style = if r == 0 { "" } else { ", style=dashed" };
        for s in 0..model.num_states() {
            for (l, label) in schema.labels.iter().enumerate() {
                for (t, value) in model.row(r, s, l).entries() {
                    let _ = writeln!(
                        out,
                        "  s{s} -> s{t} [label=\"{}/{}\"{style}];",
                        escape(label),
                        value
                    );
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_edge_per_support_entry() {
        let m = FutsModel::from_json(
            r#"{"schemas":[{"index":1,"labels":["a"],"semiring":"rational"}],
                "states":["P","Q"],
                "rows":[{"rel":1,"state":"P","label":"a","cont":{"P":"1/2","Q":"3/2"}},
                        {"rel":1,"state":"Q","label":"a","cont":{}}]}"#,
        )
        .unwrap();
        let dot = to_dot(&m);
        assert_eq!(dot.matches("->").count(), 2);
        assert!(dot.contains("s0 -> s1 [label=\"a/3/2\"]"));
    }
}
