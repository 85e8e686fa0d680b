//! Conversions between offline justifications and explanation trees.

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use crate::explain::{Label, VertexLabeledTree};
use crate::program::{Atom, AtomSet, Program, Rule};

use super::egraph::{EGraph, ENode, Literal, Sign, Support};
use super::WfError;

fn malformed(msg: impl Into<String>) -> WfError {
    WfError::Malformed(msg.into())
}

fn find_rule(program: &Program, head: &Atom, support: &Support) -> Result<Arc<Rule>, WfError> {
    let (pos, neg): (BTreeSet<&Atom>, BTreeSet<&Atom>) = match support {
        Support::Top => (BTreeSet::new(), BTreeSet::new()),
        Support::Literals(l) if !l.is_empty() => (
            l.iter().filter_map(|x| if let Literal::Pos(a) = x { Some(a) } else { None }).collect(),
            l.iter().filter_map(|x| if let Literal::Neg(a) = x { Some(a) } else { None }).collect(),
        ),
        other => return Err(malformed(format!("support of {head}+ is {other:?}, which no rule body matches"))),
    };
    program
        .rules
        .iter()
        .find(|r| {
            r.head.as_ref() == Some(head)
                && r.card.is_empty()
                && r.pos.iter().collect::<BTreeSet<_>>() == pos
                && r.neg.iter().collect::<BTreeSet<_>>() == neg
        })
        .map(|r| Arc::new(r.clone()))
        .ok_or_else(|| malformed(format!("no rule for {head} has the body given by its support")))
}

/// Unfolds the justification `g` of `p+` into an explanation tree, breadth
/// first: an atom vertex gets the rule whose body is the atom's support, a
/// rule vertex gets one atom vertex per positive body atom.
pub fn justification_to_explanation(
    program: &Program,
    x: &AtomSet,
    p: &Atom,
    g: &EGraph,
) -> Result<VertexLabeledTree, WfError> {
    if !x.contains(p) {
        return Err(malformed(format!("{p} is not in the answer set")));
    }
    let mut tree = VertexLabeledTree::with_root(Label::Atom(p.clone()));
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let a = tree.label(v).as_atom().expect("queue holds atom vertices").clone();
        let node = ENode::Pos(a.clone());
        if !g.contains(&node) {
            return Err(malformed(format!("{node} is not a node of the justification")));
        }
        let support = g.support_of(&node)?;
        let rule = find_rule(program, &a, &support)?;
        let rv = tree.add_child(v, Label::Rule(rule.clone()));
        for b in &rule.pos {
            let mut up = Some(v);
            while let Some(anc) = up {
                if tree.label(anc).as_atom() == Some(b) {
                    return Err(malformed(format!("positive cycle through {b}")));
                }
                up = tree.parent(anc);
            }
            queue.push_back(tree.add_child(rv, Label::Atom(b.clone())));
        }
    }
    Ok(tree)
}

/// Turns an explanation tree with pairwise distinct labels into an offline
/// justification of its root atom in the reduct of `program` by `x`.
pub fn explanation_to_justification(x: &AtomSet, tree: &VertexLabeledTree) -> Result<EGraph, WfError> {
    if !tree.has_unique_labels() {
        return Err(WfError::LabelsNotUnique);
    }
    let Some(root) = tree.root() else { return Err(malformed("the explanation tree is empty")) };
    if !tree.label(root).is_atom() {
        return Err(malformed("the root of an explanation tree must be an atom vertex"));
    }
    let mut g = EGraph::new();
    for v in tree.preorder() {
        let Label::Atom(a) = tree.label(v) else { continue };
        let from = ENode::Pos(a.clone());
        g.add_node(from.clone());
        let [r] = tree.children(v) else {
            return Err(malformed(format!("atom vertex {a} must have exactly one rule child")));
        };
        let Label::Rule(rule) = tree.label(*r) else {
            return Err(malformed(format!("child of atom vertex {a} is not a rule")));
        };
        let fact_in_reduct = rule.pos.is_empty() && rule.card.is_empty() && !rule.neg.iter().any(|n| x.contains(n));
        if fact_in_reduct {
            g.add_edge(from, ENode::Top, Sign::Plus);
            continue;
        }
        for &c in tree.children(*r) {
            let Label::Atom(b) = tree.label(c) else {
                return Err(malformed(format!("child of rule vertex {rule} is not an atom")));
            };
            g.add_edge(from.clone(), ENode::Pos(b.clone()), Sign::Plus);
        }
    }
    Ok(g)
}
