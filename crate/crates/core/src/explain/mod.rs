//! And-or explanation trees and the explanations extracted from them.

mod andor;
mod enumerate;
mod tree;
pub mod validate;
mod weights;

use std::sync::Arc;

use thiserror::Error;

use crate::grounder::RuleSource;
use crate::program::{Atom, AtomSet, Rule};

pub use andor::{create_tree, AndOrTree, Explanandum, TreeId};
pub use enumerate::{count_explanations, enumerate_explanations, DEFAULT_ENUMERATION_CAP};
pub use tree::{Label, VertexId, VertexLabeledTree};
pub use weights::{
    calculate_difference, calculate_weight, extract_exp, DiffWeightMap, Objective, RuleVertexSet, WeightMap,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExplainError {
    #[error("atom {0} is not in the answer set")]
    AtomNotInAnswerSet(Atom),
    #[error("unknown explanandum `{0}`: it is neither an atom of the answer set nor a rule of the program")]
    UnknownExplanandum(String),
    #[error("enumeration cap exceeded: more than {cap} explanations")]
    CapExceeded { cap: u64 },
    #[error("rule vertex set belongs to a different and-or tree")]
    TreeMismatch,
}

/// One rule vertex of an explanation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplanationVertex {
    /// The and-or tree vertex this vertex was taken from.
    pub source: VertexId,
    pub rule: Arc<Rule>,
    /// Indices into [`Explanation::vertices`].
    pub children: Vec<usize>,
    pub parent: Option<usize>,
    pub depth: usize,
}

/// An explanation: the rule vertices of one explanation tree, with the edge
/// between two rule vertices standing for the atom vertex between them.
///
/// Vertices are stored in pre-order, so index `0` is the root rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Explanation {
    tree: TreeId,
    vertices: Vec<ExplanationVertex>,
}

impl Explanation {
    /// Walks `t` from its root, taking `pick(v)` as the rule child of every
    /// reached atom vertex `v`.
    pub(crate) fn from_choice(t: &AndOrTree, pick: impl Fn(VertexId) -> VertexId) -> Self {
        let tree = t.tree();
        let mut vertices: Vec<ExplanationVertex> = Vec::new();
        // (atom vertex, parent explanation vertex)
        let mut stack: Vec<(VertexId, Option<usize>)> = vec![(0, None)];
        while let Some((atom_vertex, parent)) = stack.pop() {
            let rv = pick(atom_vertex);
            let rule = tree.label(rv).as_rule().expect("choice is a rule vertex").clone();
            let index = vertices.len();
            let depth = parent.map_or(0, |p| vertices[p].depth + 1);
            vertices.push(ExplanationVertex { source: rv, rule, children: Vec::new(), parent, depth });
            if let Some(p) = parent {
                vertices[p].children.push(index);
            }
            for &a in tree.children(rv).iter().rev() {
                stack.push((a, Some(index)));
            }
        }
        Explanation { tree: t.id(), vertices }
    }

    pub fn tree_id(&self) -> TreeId {
        self.tree
    }

    pub fn vertices(&self) -> &[ExplanationVertex] {
        &self.vertices
    }

    /// Number of rule vertices.
    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    pub fn root_rule(&self) -> &Arc<Rule> {
        &self.vertices[0].rule
    }

    pub fn depth(&self) -> usize {
        self.vertices.iter().map(|v| v.depth).max().unwrap_or(0)
    }

    pub fn rule_vertex_set(&self) -> RuleVertexSet {
        let mut s = RuleVertexSet::new(self.tree);
        for v in &self.vertices {
            s.insert(v.source);
        }
        s
    }

    /// The tree of rule vertices alone.
    pub fn to_rule_tree(&self) -> VertexLabeledTree {
        let mut out = VertexLabeledTree::with_root(Label::Rule(self.vertices[0].rule.clone()));
        let mut map = vec![0; self.vertices.len()];
        for (i, v) in self.vertices.iter().enumerate().skip(1) {
            let parent = map[v.parent.expect("non-root vertex has a parent")];
            map[i] = out.add_child(parent, Label::Rule(v.rule.clone()));
        }
        out
    }

    /// The full explanation tree, with atom vertices restored from `t`.
    pub fn to_explanation_tree(&self, t: &AndOrTree) -> Result<VertexLabeledTree, ExplainError> {
        if t.id() != self.tree {
            return Err(ExplainError::TreeMismatch);
        }
        let src = t.tree();
        let mut out = VertexLabeledTree::empty();
        // (explanation vertex, atom vertex in `src`, parent rule vertex in `out`)
        let mut stack = vec![(0usize, 0usize, None)];
        while let Some((i, atom_src, parent)) = stack.pop() {
            let atom = src.label(atom_src).clone();
            let atom_out = match parent {
                Some(p) => out.add_child(p, atom),
                None => {
                    out = VertexLabeledTree::with_root(atom);
                    0
                }
            };
            let v = &self.vertices[i];
            let rule_out = out.add_child(atom_out, Label::Rule(v.rule.clone()));
            for (&a, &child) in src.children(v.source).iter().zip(&v.children).rev() {
                stack.push((child, a, Some(rule_out)));
            }
        }
        Ok(out)
    }
}

/// `|S \ Z|`: rule vertices of `s` not already in `z`.
pub fn distance(z: &RuleVertexSet, s: &Explanation) -> Result<usize, ExplainError> {
    if z.tree() != s.tree {
        return Err(ExplainError::TreeMismatch);
    }
    Ok(s.vertices.iter().filter(|v| !z.contains(v.source)).count())
}

impl AndOrTree {
    /// An explanation with the fewest rule vertices.
    pub fn shortest(&self) -> Explanation {
        let w = calculate_weight(self);
        extract_exp(self, w.values(), Objective::Min)
    }

    /// Up to `k` explanations, each adding as many new rule vertices as
    /// possible to those already returned. The first one is therefore a
    /// longest explanation. Stops early once nothing new can be added.
    pub fn k_different(&self, k: usize) -> Vec<Explanation> {
        let mut out = Vec::new();
        let mut seen = RuleVertexSet::new(self.id());
        for _ in 0..k {
            let dw = calculate_difference(self, &seen).expect("set built from this tree");
            if dw.get(0) == 0 {
                break;
            }
            let next = extract_exp(self, dw.values(), Objective::Max);
            seen.extend_from(&next).expect("explanation extracted from this tree");
            out.push(next);
        }
        out
    }

    /// All explanations, refusing when there are more than `cap`.
    pub fn enumerate(&self, cap: u64) -> Result<Vec<Explanation>, ExplainError> {
        enumerate_explanations(self, cap)
    }
}

/// The shortest explanation of `p`, or `None` when its and-or tree is empty.
pub fn shortest_explanation<S: RuleSource + ?Sized>(
    source: &S,
    x: &AtomSet,
    p: &Atom,
) -> Result<Option<Explanation>, ExplainError> {
    Ok(AndOrTree::build(source, x, p)?.map(|t| t.shortest()))
}

/// Up to `k` mutually different explanations of `p`.
pub fn k_different_explanations<S: RuleSource + ?Sized>(
    source: &S,
    x: &AtomSet,
    p: &Atom,
    k: usize,
) -> Result<Vec<Explanation>, ExplainError> {
    Ok(AndOrTree::build(source, x, p)?.map(|t| t.k_different(k)).unwrap_or_default())
}
