//! Independent structural checks of and-or trees against a ground program.
//!
//! These re-derive the expected shape from the program directly, without the
//! construction code, and serve as test oracles.

use crate::program::{supporting_rules, Atom, AtomSet, Program};

use super::tree::{Label, VertexId, VertexLabeledTree};

/// Whether `p` has a derivation in `x` that never revisits an atom of `path`.
fn derivable(program: &Program, x: &AtomSet, p: &Atom, path: &AtomSet) -> bool {
    if !x.contains(p) || path.contains(p) {
        return false;
    }
    let mut path = path.clone();
    path.insert(p.clone());
    supporting_rules(program, p, x, &path).into_iter().any(|r| r.pos.iter().all(|b| derivable(program, x, b, &path)))
}

/// Checks that `tree` is the and-or explanation tree of `p` with respect to
/// `x`. Returns a description of the first violation found.
///
/// Exponential in the worst case; meant for small programs.
pub fn check_and_or_tree(tree: &VertexLabeledTree, program: &Program, x: &AtomSet, p: &Atom) -> Result<(), String> {
    let program = program.deduplicated();
    let Some(root) = tree.root() else {
        return if derivable(&program, x, p, &AtomSet::new()) {
            Err(format!("tree is empty but {p} has a derivation"))
        } else {
            Ok(())
        };
    };
    if tree.label(root) != &Label::Atom(p.clone()) {
        return Err(format!("root is labeled {} instead of {p}", tree.label(root)));
    }
    let mut stack: Vec<(VertexId, AtomSet)> = vec![(root, AtomSet::new())];
    while let Some((v, mut path)) = stack.pop() {
        let kids = tree.children(v);
        match tree.label(v) {
            Label::Atom(a) => {
                if !x.contains(a) {
                    return Err(format!("atom vertex {v} ({a}) is not in the answer set"));
                }
                if path.contains(a) {
                    return Err(format!("atom {a} repeats on a root path"));
                }
                path.insert(a.clone());
                let expected: Vec<_> = supporting_rules(&program, a, x, &path)
                    .into_iter()
                    .filter(|r| r.pos.iter().all(|b| derivable(&program, x, b, &path)))
                    .collect();
                if kids.is_empty() {
                    return Err(format!("atom vertex {v} ({a}) is a leaf"));
                }
                let labels: Vec<_> = kids.iter().map(|&c| tree.label(c)).collect();
                for (c, l) in kids.iter().zip(&labels) {
                    match l {
                        Label::Rule(r) if expected.iter().any(|e| **e == **r) => {}
                        Label::Rule(r) => return Err(format!("rule vertex {c} ({r}) does not support {a}")),
                        Label::Atom(b) => return Err(format!("atom vertex {c} ({b}) is a child of atom {a}")),
                    }
                }
                for e in &expected {
                    let n = labels.iter().filter(|l| matches!(l, Label::Rule(r) if **r == **e)).count();
                    if n != 1 {
                        return Err(format!("rule {e} appears {n} times below {a}"));
                    }
                }
                stack.extend(kids.iter().map(|&c| (c, path.clone())));
            }
            Label::Rule(r) => {
                let got: Vec<Option<&Atom>> = kids.iter().map(|&c| tree.label(c).as_atom()).collect();
                let want: Vec<Option<&Atom>> = r.pos.iter().map(Some).collect();
                if got != want {
                    return Err(format!("children of rule vertex {v} ({r}) do not match its positive body"));
                }
                stack.extend(kids.iter().map(|&c| (c, path.clone())));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explain::AndOrTree;
    use crate::grounder::GroundIndex;
    use crate::io::{parse_answer_set, parse_program, parse_rule};
    use std::sync::Arc;

    #[test]
    fn accepts_built_tree_and_rejects_mutations() {
        let program = parse_program("a :- b, c. a :- d. d. b :- c. c.").unwrap();
        let x = parse_answer_set("a b c d").unwrap();
        let t = AndOrTree::build(&GroundIndex::new(&program), &x, &Atom::prop("a")).unwrap().unwrap();
        assert_eq!(check_and_or_tree(t.tree(), &program, &x, &Atom::prop("a")), Ok(()));

        let mut missing = VertexLabeledTree::with_root(Label::Atom(Atom::prop("a")));
        let r = missing.add_child(0, Label::Rule(Arc::new(parse_rule("a :- d.").unwrap())));
        let d = missing.add_child(r, Label::Atom(Atom::prop("d")));
        missing.add_child(d, Label::Rule(Arc::new(parse_rule("d.").unwrap())));
        assert!(check_and_or_tree(&missing, &program, &x, &Atom::prop("a")).is_err());
        assert!(check_and_or_tree(&VertexLabeledTree::empty(), &program, &x, &Atom::prop("a")).is_err());
    }
}
