//! Graphviz rendering of witness files.
//!
//! Tree edges are drawn red when the parent/child pair is required to be
//! inconsistent and the oracle agrees, orange when it disagrees, gray
//! otherwise. Nodes of the first maximal member of the exact family are
//! filled. For arrays, each row is a cluster and same-row pairs get edges.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::index::{IndexSpace, Label};
use crate::oracles::ConsistencyOracle;
use crate::patterns::{exact_family, DEFAULT_VERIFY_CAP};
use crate::witness_file::WitnessFile;

const MAX_PARAM_CHARS: usize = 18;

fn abbreviate(text: &str) -> String {
    if text.chars().count() <= MAX_PARAM_CHARS {
        text.to_string()
    } else {
        let head: String = text.chars().take(MAX_PARAM_CHARS - 3).collect();
        format!("{head}…({} chars)", text.chars().count())
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn export_dot(file: &WitnessFile) -> String {
    let w = &file.witness;
    let space = *w.space();
    let labels = space.labels();
    let required: BTreeSet<Vec<usize>> = file
        .pattern
        .required_inconsistent(DEFAULT_VERIFY_CAP)
        .map(|v| v.into_iter().filter(|s| s.len() == 2).collect())
        .unwrap_or_default();
    let highlight: BTreeSet<usize> = exact_family(&file.pattern)
        .ok()
        .and_then(|f| f.members().first().cloned())
        .unwrap_or_default()
        .into_iter()
        .collect();

    let node_text = |i: usize| {
        let params: Vec<String> = w.component_params(i).iter().map(|p| abbreviate(&p.to_text())).collect();
        let name = match &labels[i] {
            Label::Node(n) if n.is_root() => "⟨⟩".to_string(),
            l => space.label_text(l),
        };
        format!("{name}\\n{}", params.join(", "))
    };
    let edge_style = |a: usize, b: usize| {
        if required.contains(&vec![a.min(b), a.max(b)]) {
            if w.consistent(&[a.min(b), a.max(b)]) {
                "color=orange, penwidth=2"
            } else {
                "color=red, penwidth=2"
            }
        } else {
            "color=gray"
        }
    };

    let mut out = String::new();
    let _ = writeln!(out, "digraph witness {{");
    let _ = writeln!(out, "  label={};", quote(&format!("{} witness, {} backend", file.pattern.kind, w.base().backend())));
    let _ = writeln!(out, "  node [shape=box, fontname=\"monospace\"];");
    let node_line = |out: &mut String, i: usize, indent: &str| {
        let fill = if highlight.contains(&i) { ", style=filled, fillcolor=lightblue" } else { "" };
        let _ = writeln!(out, "{indent}n{i} [label=\"{}\"{fill}];", node_text(i).replace('"', "\\\""));
    };
    match space {
        IndexSpace::Tree(_) => {
            for i in 0..labels.len() {
                node_line(&mut out, i, "  ");
            }
            for (i, l) in labels.iter().enumerate() {
                if let Label::Node(n) = l {
                    if let Some(parent) = n.parent() {
                        let p = space.node_position(&parent).expect("parent in domain");
                        let _ = writeln!(out, "  n{p} -> n{i} [{}];", edge_style(p, i));
                    }
                }
            }
        }
        IndexSpace::Array { rows, cols } => {
            for r in 0..rows {
                let _ = writeln!(out, "  subgraph cluster_row{r} {{");
                let _ = writeln!(out, "    label=\"row {r}\";");
                for c in 0..cols {
                    node_line(&mut out, r * cols + c, "    ");
                }
                for a in 0..cols {
                    for b in a + 1..cols {
                        let (x, y) = (r * cols + a, r * cols + b);
                        let _ = writeln!(out, "    n{x} -> n{y} [dir=none, {}];", edge_style(x, y));
                    }
                }
                let _ = writeln!(out, "  }}");
            }
        }
        IndexSpace::Set { .. } => {
            for i in 0..labels.len() {
                node_line(&mut out, i, "  ");
            }
        }
    }
    out.push_str("}\n");
    out
}
