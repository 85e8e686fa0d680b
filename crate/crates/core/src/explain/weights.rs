use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use super::andor::{AndOrTree, TreeId};
use super::tree::VertexId;
use super::{ExplainError, Explanation};

/// How extraction picks the rule child of an atom vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Min,
    Max,
}

/// A set of rule vertices belonging to one and-or tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleVertexSet {
    tree: TreeId,
    ids: BTreeSet<VertexId>,
}

impl RuleVertexSet {
    pub fn new(tree: TreeId) -> Self {
        RuleVertexSet { tree, ids: BTreeSet::new() }
    }

    pub fn tree(&self) -> TreeId {
        self.tree
    }

    pub fn ids(&self) -> &BTreeSet<VertexId> {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.ids.contains(&v)
    }

    pub fn insert(&mut self, v: VertexId) {
        self.ids.insert(v);
    }

    pub fn extend_from(&mut self, e: &Explanation) -> Result<(), ExplainError> {
        if e.tree_id() != self.tree {
            return Err(ExplainError::TreeMismatch);
        }
        self.ids.extend(e.vertices().iter().map(|v| v.source));
        Ok(())
    }
}

/// Size of the smallest explanation tree below each vertex, counted in rule
/// vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightMap {
    tree: TreeId,
    values: Vec<u64>,
}

/// Largest number of rule vertices outside a given set that an explanation
/// tree below each vertex can contain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffWeightMap {
    tree: TreeId,
    values: Vec<u64>,
}

impl WeightMap {
    pub fn get(&self, v: VertexId) -> u64 {
        self.values[v]
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn tree(&self) -> TreeId {
        self.tree
    }
}

impl DiffWeightMap {
    pub fn get(&self, v: VertexId) -> u64 {
        self.values[v]
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn tree(&self) -> TreeId {
        self.tree
    }
}

// Children always carry larger ids than their parent, so one pass in
// decreasing id order is a bottom-up traversal.
fn bottom_up(t: &AndOrTree, mut rule_weight: impl FnMut(VertexId, u64) -> u64, atom: Objective) -> Vec<u64> {
    let tree = t.tree();
    let mut w = vec![0u64; tree.len()];
    for v in tree.vertex_ids().rev() {
        let kids = tree.children(v).iter().map(|&c| w[c]);
        w[v] = if t.is_rule_vertex(v) {
            let sum = kids.fold(0u64, u64::saturating_add);
            rule_weight(v, sum)
        } else {
            match atom {
                Objective::Min => kids.min(),
                Objective::Max => kids.max(),
            }
            .expect("atom vertex of a non-empty and-or tree has a rule child")
        };
    }
    w
}

pub fn calculate_weight(t: &AndOrTree) -> WeightMap {
    WeightMap { tree: t.id(), values: bottom_up(t, |_, sum| sum.saturating_add(1), Objective::Min) }
}

pub fn calculate_difference(t: &AndOrTree, r: &RuleVertexSet) -> Result<DiffWeightMap, ExplainError> {
    if r.tree != t.id() {
        return Err(ExplainError::TreeMismatch);
    }
    let values = bottom_up(t, |v, sum| if r.contains(v) { sum } else { sum.saturating_add(1) }, Objective::Max);
    Ok(DiffWeightMap { tree: t.id(), values })
}

/// Rank of every distinct rule text, used as a deterministic tie-breaker.
fn rule_ranks(t: &AndOrTree) -> Vec<u32> {
    let tree = t.tree();
    let texts: Vec<Option<String>> =
        tree.vertex_ids().map(|v| tree.label(v).as_rule().map(|r| r.canonical())).collect();
    let sorted: BTreeSet<&str> = texts.iter().flatten().map(String::as_str).collect();
    let rank: HashMap<&str, u32> = sorted.into_iter().enumerate().map(|(i, s)| (s, i as u32)).collect();
    texts.iter().map(|t| t.as_deref().map_or(0, |s| rank[s])).collect()
}

/// Picks, for every atom vertex, the rule child that best fits `op`.
///
/// Ties are broken by the pre-order sequence of rule texts of the subtree each
/// candidate would produce, compared lexicographically; if those agree too,
/// the earlier child wins.
pub(crate) fn choose(t: &AndOrTree, weights: &[u64], op: Objective) -> Vec<Option<VertexId>> {
    let tree = t.tree();
    let ranks = rule_ranks(t);
    let mut key: Vec<Rc<[u32]>> = vec![Rc::from(Vec::new()); tree.len()];
    let mut chosen = vec![None; tree.len()];
    for v in tree.vertex_ids().rev() {
        if t.is_rule_vertex(v) {
            let mut k = vec![ranks[v]];
            for &c in tree.children(v) {
                k.extend_from_slice(&key[c]);
            }
            key[v] = Rc::from(k);
        } else {
            let mut best: Option<VertexId> = None;
            for &c in tree.children(v) {
                let better = match best {
                    None => true,
                    Some(b) => {
                        let by_weight = match op {
                            Objective::Min => weights[c].cmp(&weights[b]),
                            Objective::Max => weights[b].cmp(&weights[c]),
                        };
                        by_weight.then_with(|| key[c].cmp(&key[b])).is_lt()
                    }
                };
                if better {
                    best = Some(c);
                }
            }
            let b = best.expect("atom vertex has a rule child");
            chosen[v] = Some(b);
            key[v] = key[b].clone();
        }
    }
    chosen
}

/// Extracts an explanation following `weights` with objective `op`.
pub fn extract_exp(t: &AndOrTree, weights: &[u64], op: Objective) -> Explanation {
    assert_eq!(weights.len(), t.len(), "weight map does not fit the tree");
    let chosen = choose(t, weights, op);
    Explanation::from_choice(t, |v| chosen[v].expect("atom vertex has a choice"))
}
