//! JSON envelope shared by trees, explanations and e-graphs.
//!
//! ```json
//! {"kind": "tree", "root": 0,
//!  "vertices": [{"id": 0, "label_kind": "atom", "label_text": "a"}],
//!  "edges": [{"from": 0, "to": 1, "sign": "+"}]}
//! ```
//!
//! Tree labels are `atom` or `rule`; e-graph labels are `pos`, `neg`,
//! `assume`, `top` and `bottom`. `sign` only appears on e-graph edges.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::explain::{Explanation, Label, VertexLabeledTree};
use crate::wf::{EGraph, ENode, Sign};

use super::parser::{parse_ground_atom, parse_rule};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JsonError {
    #[error("invalid JSON: {0}")]
    Syntax(String),
    #[error("invalid document: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> JsonError {
    JsonError::Invalid(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Tree,
    Explanation,
    Egraph,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonVertex {
    pub id: usize,
    pub label_kind: String,
    pub label_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonEdge {
    pub from: usize,
    pub to: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub kind: Kind,
    pub root: Option<usize>,
    pub vertices: Vec<JsonVertex>,
    pub edges: Vec<JsonEdge>,
}

impl Document {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn parse(text: &str) -> Result<Self, JsonError> {
        serde_json::from_str(text).map_err(|e| JsonError::Syntax(e.to_string()))
    }

    pub fn from_tree(t: &VertexLabeledTree) -> Self {
        Document {
            kind: Kind::Tree,
            root: t.root(),
            vertices: t
                .vertex_ids()
                .map(|v| {
                    let label = t.label(v);
                    let kind = if label.is_atom() { "atom" } else { "rule" };
                    JsonVertex { id: v, label_kind: kind.into(), label_text: label.text() }
                })
                .collect(),
            edges: t.edges().map(|(from, to)| JsonEdge { from, to, sign: None }).collect(),
        }
    }

    /// Rule vertices keep the id of the and-or tree vertex they came from.
    pub fn from_explanation(e: &Explanation) -> Self {
        let vs = e.vertices();
        let mut vertices: Vec<JsonVertex> = vs
            .iter()
            .map(|v| JsonVertex { id: v.source, label_kind: "rule".into(), label_text: v.rule.canonical() })
            .collect();
        vertices.sort_by_key(|v| v.id);
        let mut edges: Vec<JsonEdge> = vs
            .iter()
            .flat_map(|v| v.children.iter().map(move |&c| JsonEdge { from: v.source, to: vs[c].source, sign: None }))
            .collect();
        edges.sort_by_key(|e| (e.from, e.to));
        Document { kind: Kind::Explanation, root: vs.first().map(|v| v.source), vertices, edges }
    }

    /// Node ids follow the graph's sorted node order.
    pub fn from_egraph(g: &EGraph, root: Option<&ENode>) -> Self {
        let ids: HashMap<&ENode, usize> = g.nodes().iter().enumerate().map(|(i, n)| (n, i)).collect();
        let vertices = g
            .nodes()
            .iter()
            .enumerate()
            .map(|(id, n)| {
                let (kind, text) = match n {
                    ENode::Pos(a) => ("pos", a.to_string()),
                    ENode::Neg(a) => ("neg", a.to_string()),
                    ENode::Assume => ("assume", "assume".to_string()),
                    ENode::Top => ("top", "top".to_string()),
                    ENode::Bottom => ("bottom", "bottom".to_string()),
                };
                JsonVertex { id, label_kind: kind.into(), label_text: text }
            })
            .collect();
        let mut edges: Vec<JsonEdge> = g
            .edges()
            .iter()
            .map(|(f, t, s)| JsonEdge { from: ids[f], to: ids[t], sign: Some(s.symbol().into()) })
            .collect();
        edges.sort_by_key(|e| (e.from, e.to, e.sign.clone()));
        Document { kind: Kind::Egraph, root: root.and_then(|r| ids.get(r).copied()), vertices, edges }
    }

    fn labels<T>(&self, parse: impl Fn(&JsonVertex) -> Result<T, JsonError>) -> Result<BTreeMap<usize, T>, JsonError> {
        let mut out = BTreeMap::new();
        for v in &self.vertices {
            if out.insert(v.id, parse(v)?).is_some() {
                return Err(invalid(format!("duplicate vertex id {}", v.id)));
            }
        }
        for e in &self.edges {
            for end in [e.from, e.to] {
                if !out.contains_key(&end) {
                    return Err(invalid(format!("edge endpoint {end} is not a vertex")));
                }
            }
        }
        Ok(out)
    }

    /// A tree or explanation document as a vertex-labeled tree. Vertices are
    /// renumbered in pre-order; sibling order follows the edge list.
    pub fn to_tree(&self) -> Result<VertexLabeledTree, JsonError> {
        if self.kind == Kind::Egraph {
            return Err(invalid("expected a tree or explanation document, found an e-graph"));
        }
        let labels = self.labels(|v| match v.label_kind.as_str() {
            "atom" if self.kind == Kind::Tree => {
                parse_ground_atom(&v.label_text).map(Label::Atom).map_err(|e| invalid(format!("vertex {}: {e}", v.id)))
            }
            "rule" => parse_rule(&v.label_text)
                .map(|r| Label::Rule(Arc::new(r)))
                .map_err(|e| invalid(format!("vertex {}: {e}", v.id))),
            other => Err(invalid(format!("vertex {}: unexpected label kind `{other}`", v.id))),
        })?;
        if let Some(e) = self.edges.iter().find(|e| e.sign.is_some()) {
            return Err(invalid(format!("tree edge {} -> {} carries a sign", e.from, e.to)));
        }
        let Some(root) = self.root else {
            return if labels.is_empty() { Ok(VertexLabeledTree::empty()) } else { Err(invalid("missing root")) };
        };
        if !labels.contains_key(&root) {
            return Err(invalid(format!("root {root} is not a vertex")));
        }
        let mut children: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut has_parent = BTreeMap::new();
        for e in &self.edges {
            if e.to == root || has_parent.insert(e.to, e.from).is_some() {
                return Err(invalid(format!("vertex {} has more than one parent", e.to)));
            }
            children.entry(e.from).or_default().push(e.to);
        }
        let mut tree = VertexLabeledTree::empty();
        let mut stack: Vec<(usize, Option<usize>)> = vec![(root, None)];
        while let Some((id, parent)) = stack.pop() {
            let at = match parent {
                None => {
                    tree = VertexLabeledTree::with_root(labels[&id].clone());
                    0
                }
                Some(p) => tree.add_child(p, labels[&id].clone()),
            };
            // Pushed in reverse so siblings are visited, and numbered, in order.
            for &c in children.get(&id).map_or(&[][..], Vec::as_slice).iter().rev() {
                stack.push((c, Some(at)));
            }
        }
        if tree.len() != labels.len() {
            return Err(invalid("some vertices are not reachable from the root"));
        }
        Ok(tree)
    }

    /// An e-graph document as a graph, with its root node if one is given.
    pub fn to_egraph(&self) -> Result<(EGraph, Option<ENode>), JsonError> {
        if self.kind != Kind::Egraph {
            return Err(invalid("expected an e-graph document"));
        }
        let nodes = self.labels(|v| {
            let atom = || parse_ground_atom(&v.label_text).map_err(|e| invalid(format!("vertex {}: {e}", v.id)));
            Ok(match v.label_kind.as_str() {
                "pos" => ENode::Pos(atom()?),
                "neg" => ENode::Neg(atom()?),
                "assume" => ENode::Assume,
                "top" => ENode::Top,
                "bottom" => ENode::Bottom,
                other => return Err(invalid(format!("vertex {}: unexpected label kind `{other}`", v.id))),
            })
        })?;
        let mut g = EGraph::new();
        for n in nodes.values() {
            g.add_node(n.clone());
        }
        if g.nodes().len() != nodes.len() {
            return Err(invalid("two vertices carry the same node"));
        }
        for e in &self.edges {
            let sign = match e.sign.as_deref() {
                Some("+") => Sign::Plus,
                Some("-") | Some("−") => Sign::Minus,
                Some(s) => return Err(invalid(format!("edge {} -> {}: unknown sign `{s}`", e.from, e.to))),
                None => return Err(invalid(format!("edge {} -> {} has no sign", e.from, e.to))),
            };
            g.add_edge(nodes[&e.from].clone(), nodes[&e.to].clone(), sign);
        }
        let root = match self.root {
            None => None,
            Some(r) => Some(nodes.get(&r).cloned().ok_or_else(|| invalid(format!("root {r} is not a vertex")))?),
        };
        Ok((g, root))
    }
}

pub fn tree_to_json(t: &VertexLabeledTree) -> String {
    Document::from_tree(t).to_json()
}

pub fn explanation_to_json(e: &Explanation) -> String {
    Document::from_explanation(e).to_json()
}

/// Several explanations as one JSON array.
pub fn explanations_to_json(es: &[Explanation]) -> String {
    let docs: Vec<Document> = es.iter().map(Document::from_explanation).collect();
    serde_json::to_string_pretty(&docs).expect("documents serialize")
}

pub fn egraph_to_json(g: &EGraph, root: Option<&ENode>) -> String {
    Document::from_egraph(g, root).to_json()
}

pub fn parse_tree_json(text: &str) -> Result<VertexLabeledTree, JsonError> {
    Document::parse(text)?.to_tree()
}

pub fn parse_egraph_json(text: &str) -> Result<(EGraph, Option<ENode>), JsonError> {
    Document::parse(text)?.to_egraph()
}
