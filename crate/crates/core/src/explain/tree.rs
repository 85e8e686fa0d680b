use std::fmt;
use std::sync::Arc;

use crate::program::{Atom, Rule};

pub type VertexId = usize;

/// A vertex label: an atom of the answer set or a rule of the program.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Label {
    Atom(Atom),
    Rule(Arc<Rule>),
}

impl Label {
    pub fn is_atom(&self) -> bool {
        matches!(self, Label::Atom(_))
    }

    pub fn is_rule(&self) -> bool {
        matches!(self, Label::Rule(_))
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Label::Atom(a) => Some(a),
            Label::Rule(_) => None,
        }
    }

    pub fn as_rule(&self) -> Option<&Arc<Rule>> {
        match self {
            Label::Rule(r) => Some(r),
            Label::Atom(_) => None,
        }
    }

    /// Canonical text: the atom, or the rule in parseable form.
    pub fn text(&self) -> String {
        match self {
            Label::Atom(a) => a.to_string(),
            Label::Rule(r) => r.canonical(),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Vertex {
    label: Label,
    parent: Option<VertexId>,
    children: Vec<VertexId>,
}

/// A rooted tree whose vertices are labeled by atoms or rules.
///
/// Vertex `0` is the root whenever the tree is non-empty, and every vertex is
/// added below an existing one, so the structure is a tree by construction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VertexLabeledTree {
    vertices: Vec<Vertex>,
}

impl VertexLabeledTree {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn with_root(label: Label) -> Self {
        VertexLabeledTree { vertices: vec![Vertex { label, parent: None, children: Vec::new() }] }
    }

    pub fn add_child(&mut self, parent: VertexId, label: Label) -> VertexId {
        assert!(parent < self.vertices.len(), "parent {parent} out of range");
        let id = self.vertices.len();
        self.vertices.push(Vertex { label, parent: Some(parent), children: Vec::new() });
        self.vertices[parent].children.push(id);
        id
    }

    /// Pushes a vertex that is not yet attached to its parent's child list.
    pub(crate) fn push_detached(&mut self, parent: Option<VertexId>, label: Label) -> VertexId {
        let id = self.vertices.len();
        self.vertices.push(Vertex { label, parent, children: Vec::new() });
        id
    }

    pub(crate) fn attach(&mut self, parent: VertexId, child: VertexId) {
        self.vertices[parent].children.push(child);
    }

    pub(crate) fn truncate(&mut self, len: usize) {
        self.vertices.truncate(len);
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn root(&self) -> Option<VertexId> {
        (!self.vertices.is_empty()).then_some(0)
    }

    pub fn label(&self, v: VertexId) -> &Label {
        &self.vertices[v].label
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.vertices[v].children
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.vertices[v].parent
    }

    pub fn vertex_ids(&self) -> std::ops::Range<VertexId> {
        0..self.vertices.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices.iter().enumerate().flat_map(|(v, x)| x.children.iter().map(move |&c| (v, c)))
    }

    pub fn depth(&self, mut v: VertexId) -> usize {
        let mut d = 0;
        while let Some(p) = self.vertices[v].parent {
            v = p;
            d += 1;
        }
        d
    }

    pub fn atom_vertex_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.label.is_atom()).count()
    }

    pub fn rule_vertex_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.label.is_rule()).count()
    }

    /// Vertex ids in depth-first pre-order.
    pub fn preorder(&self) -> Vec<VertexId> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack: Vec<VertexId> = self.root().into_iter().collect();
        while let Some(v) = stack.pop() {
            out.push(v);
            stack.extend(self.children(v).iter().rev());
        }
        out
    }

    /// Whether no two vertices share a label.
    pub fn has_unique_labels(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.vertices.iter().all(|v| seen.insert(&v.label))
    }

    /// A string that is equal for two trees iff they are isomorphic as
    /// labeled unordered trees.
    pub fn canonical_form(&self) -> String {
        let mut forms: Vec<String> = vec![String::new(); self.len()];
        for v in self.postorder() {
            let mut kids: Vec<&str> = self.children(v).iter().map(|&c| forms[c].as_str()).collect();
            kids.sort_unstable();
            let kind = if self.label(v).is_atom() { 'A' } else { 'R' };
            let mut s = format!("{kind}{:?}[", self.label(v).text());
            s.push_str(&kids.join(","));
            s.push(']');
            forms[v] = s;
        }
        self.root().map(|r| std::mem::take(&mut forms[r])).unwrap_or_default()
    }

    pub fn is_label_isomorphic(&self, other: &VertexLabeledTree) -> bool {
        self.len() == other.len() && self.canonical_form() == other.canonical_form()
    }

    fn postorder(&self) -> Vec<VertexId> {
        let mut order = self.preorder();
        // Children follow their parent in pre-order, so the reverse visits
        // every child before its parent.
        order.reverse();
        order
    }

    /// Inserts the head atom above every rule vertex that is not already
    /// below an atom vertex, turning a tree of rules into an explanation tree.
    pub fn with_atom_vertices(&self) -> Option<VertexLabeledTree> {
        let root = self.root()?;
        if self.label(root).is_atom() {
            return Some(self.clone());
        }
        let head = |v: VertexId| self.label(v).as_rule().and_then(|r| r.head.clone());
        let mut out = VertexLabeledTree::with_root(Label::Atom(head(root)?));
        let mut stack = vec![(root, 0usize)];
        while let Some((v, atom_out)) = stack.pop() {
            let rule_out = out.add_child(atom_out, self.label(v).clone());
            let mut pending = Vec::new();
            for &c in self.children(v) {
                if !self.label(c).is_rule() {
                    return None;
                }
                pending.push((c, out.add_child(rule_out, Label::Atom(head(c)?))));
            }
            stack.extend(pending.into_iter().rev());
        }
        Some(out)
    }

    /// Applies `f` to every label, keeping the shape.
    pub fn map_labels(&self, mut f: impl FnMut(&Label) -> Label) -> VertexLabeledTree {
        VertexLabeledTree {
            vertices: self
                .vertices
                .iter()
                .map(|v| Vertex { label: f(&v.label), parent: v.parent, children: v.children.clone() })
                .collect(),
        }
    }
}
