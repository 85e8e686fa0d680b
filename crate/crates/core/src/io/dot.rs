//! Graphviz DOT output. Node names are `n<id>` with the same ids as the JSON
//! output, so both formats name vertices identically.

use std::collections::HashMap;
use std::fmt::Write;

use crate::explain::{Explanation, VertexLabeledTree};
use crate::wf::{EGraph, ENode};

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out
}

fn node(out: &mut String, id: usize, shape: &str, label: &str) {
    writeln!(out, "  n{id} [shape={shape}, label=\"{}\"];", escape(label)).unwrap();
}

pub fn tree_to_dot(t: &VertexLabeledTree) -> String {
    let mut out = String::from("digraph explanation {\n");
    for v in t.vertex_ids() {
        let label = t.label(v);
        node(&mut out, v, if label.is_atom() { "ellipse" } else { "box" }, &label.text());
    }
    for (from, to) in t.edges() {
        writeln!(out, "  n{from} -> n{to};").unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn explanation_to_dot(e: &Explanation) -> String {
    let mut out = String::from("digraph explanation {\n");
    for v in e.vertices() {
        node(&mut out, v.source, "box", &v.rule.canonical());
    }
    for v in e.vertices() {
        for &c in &v.children {
            writeln!(out, "  n{} -> n{};", v.source, e.vertices()[c].source).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

pub fn egraph_to_dot(g: &EGraph) -> String {
    let ids: HashMap<&ENode, usize> = g.nodes().iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut out = String::from("digraph justification {\n");
    for (i, n) in g.nodes().iter().enumerate() {
        node(&mut out, i, if n.is_marker() { "plaintext" } else { "ellipse" }, &n.to_string());
    }
    for (f, t, s) in g.edges() {
        writeln!(out, "  n{} -> n{} [label=\"{}\"];", ids[f], ids[t], s.symbol()).unwrap();
    }
    out.push_str("}\n");
    out
}
