//! Brute-force enumeration of every explanation tree, for small inputs.

use std::collections::HashMap;

use super::andor::AndOrTree;
use super::tree::VertexId;
use super::{ExplainError, Explanation};

pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000;

/// Number of explanation trees, saturating at `u64::MAX`.
pub fn count_explanations(t: &AndOrTree) -> u64 {
    let tree = t.tree();
    let mut n = vec![0u64; tree.len()];
    for v in tree.vertex_ids().rev() {
        let kids = tree.children(v).iter().map(|&c| n[c]);
        n[v] = if t.is_rule_vertex(v) {
            kids.fold(1u64, u64::saturating_mul)
        } else {
            kids.fold(0u64, u64::saturating_add)
        };
    }
    n[0]
}

/// Every explanation of `t`, or [`ExplainError::CapExceeded`] when there are
/// more than `cap`.
pub fn enumerate_explanations(t: &AndOrTree, cap: u64) -> Result<Vec<Explanation>, ExplainError> {
    if count_explanations(t) > cap {
        return Err(ExplainError::CapExceeded { cap });
    }
    let tree = t.tree();
    // Each choice assigns a rule child to the atom vertices it reaches.
    type Choice = Vec<(VertexId, VertexId)>;
    let mut below: Vec<Vec<Choice>> = vec![Vec::new(); tree.len()];
    for v in tree.vertex_ids().rev() {
        below[v] = if t.is_rule_vertex(v) {
            let mut acc: Vec<Choice> = vec![Vec::new()];
            for &a in tree.children(v) {
                let mut next = Vec::with_capacity(acc.len() * below[a].len());
                for left in &acc {
                    for right in &below[a] {
                        let mut c = left.clone();
                        c.extend_from_slice(right);
                        next.push(c);
                    }
                }
                acc = next;
            }
            acc
        } else {
            let mut acc = Vec::new();
            for &r in tree.children(v) {
                for c in &below[r] {
                    let mut c = c.clone();
                    c.push((v, r));
                    acc.push(c);
                }
            }
            acc
        };
        for &c in tree.children(v) {
            below[c] = Vec::new();
        }
    }
    Ok(std::mem::take(&mut below[0])
        .into_iter()
        .map(|choice| {
            let pick: HashMap<VertexId, VertexId> = choice.into_iter().collect();
            Explanation::from_choice(t, |v| pick[&v])
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grounder::GroundIndex;
    use crate::io::{parse_answer_set, parse_program};
    use crate::program::Atom;

    fn tree(program: &str, x: &str) -> AndOrTree {
        let idx = GroundIndex::new(&parse_program(program).unwrap());
        AndOrTree::build(&idx, &parse_answer_set(x).unwrap(), &Atom::prop("a")).unwrap().unwrap()
    }

    #[test]
    fn counts_products_and_sums() {
        let t = tree("a :- b, c. a :- d. b :- d. b. c :- d. c. d.", "a b c d");
        // a :- b, c contributes 2 * 2, a :- d contributes 1.
        assert_eq!(count_explanations(&t), 5);
        let all = enumerate_explanations(&t, 10).unwrap();
        assert_eq!(all.len(), 5);
        let sizes: Vec<usize> = all.iter().map(Explanation::size).collect();
        assert_eq!(sizes.iter().min(), Some(&2));
        assert_eq!(t.shortest().size(), 2);
    }

    #[test]
    fn cap_is_enforced() {
        let t = tree("a :- b, c. a :- d. b :- d. b. c :- d. c. d.", "a b c d");
        assert_eq!(enumerate_explanations(&t, 4), Err(ExplainError::CapExceeded { cap: 4 }));
    }
}
