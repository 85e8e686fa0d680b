use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::grounder::RuleSource;
use crate::program::{supports, Atom, AtomSet, Rule};

use super::tree::{Label, VertexId, VertexLabeledTree};
use super::ExplainError;

/// Identifies one and-or tree so vertex ids from different trees never mix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeId(u64);

impl TreeId {
    fn fresh() -> Self {
        static NEXT: AtomicU64 = AtomicU64::new(0);
        TreeId(NEXT.fetch_add(1, Ordering::Relaxed))
    }
}

/// What a tree explains: an atom, or the applicability of a ground rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Explanandum {
    Atom(Atom),
    Rule(Arc<Rule>),
}

enum Frame {
    Atom { vertex: VertexId, rules: Vec<Arc<Rule>>, next: usize },
    Rule { vertex: VertexId, body: Vec<Atom>, next: usize },
}

impl Frame {
    fn vertex(&self) -> VertexId {
        match self {
            Frame::Atom { vertex, .. } | Frame::Rule { vertex, .. } => *vertex,
        }
    }
}

enum Started {
    Pushed,
    Empty,
}

struct Builder<'s, S: RuleSource + ?Sized> {
    source: &'s S,
    x: &'s AtomSet,
    arena: VertexLabeledTree,
    stack: Vec<Frame>,
    /// Atoms on the path from the root, plus the caller's initial set.
    path: AtomSet,
}

impl<S: RuleSource + ?Sized> Builder<'_, S> {
    fn start(&mut self, d: Explanandum, parent: Option<VertexId>) -> Started {
        match d {
            Explanandum::Atom(p) => {
                if !self.x.contains(&p) || self.path.contains(&p) {
                    return Started::Empty;
                }
                self.path.insert(p.clone());
                let rules: Vec<Arc<Rule>> =
                    self.source.rules_for(&p).iter().filter(|r| supports(r, &p, self.x, &self.path)).cloned().collect();
                let vertex = self.arena.push_detached(parent, Label::Atom(p));
                self.stack.push(Frame::Atom { vertex, rules, next: 0 });
            }
            Explanandum::Rule(r) => {
                let body = r.pos.clone();
                let vertex = self.arena.push_detached(parent, Label::Rule(r));
                self.stack.push(Frame::Rule { vertex, body, next: 0 });
            }
        }
        Started::Pushed
    }

    /// Pops the top frame; on failure its whole subtree is discarded.
    fn finish(&mut self, success: bool) -> Option<VertexId> {
        let frame = self.stack.pop().expect("finish on empty stack");
        let vertex = frame.vertex();
        if let Frame::Atom { .. } = frame {
            if let Label::Atom(p) = self.arena.label(vertex) {
                let p = p.clone();
                self.path.remove(&p);
            }
        }
        if success {
            Some(vertex)
        } else {
            self.arena.truncate(vertex);
            None
        }
    }

    fn run(mut self, d: Explanandum) -> VertexLabeledTree {
        let mut pending: Option<Option<VertexId>> = match self.start(d, None) {
            Started::Pushed => None,
            Started::Empty => return VertexLabeledTree::empty(),
        };
        let mut result = None;
        while let Some(frame) = self.stack.last_mut() {
            let parent = frame.vertex();
            if let Some(child) = pending.take() {
                match (child, &*frame) {
                    (Some(c), _) => self.arena.attach(parent, c),
                    (None, Frame::Atom { .. }) => {}
                    (None, Frame::Rule { .. }) => {
                        let done = self.finish(false);
                        if self.stack.is_empty() {
                            result = done;
                        }
                        pending = Some(done);
                        continue;
                    }
                }
            }
            let frame = self.stack.last_mut().expect("frame still on stack");
            let next = match frame {
                Frame::Atom { rules, next, .. } => rules.get(*next).map(|r| {
                    *next += 1;
                    Explanandum::Rule(r.clone())
                }),
                Frame::Rule { body, next, .. } => body.get(*next).map(|a| {
                    *next += 1;
                    Explanandum::Atom(a.clone())
                }),
            };
            match next {
                Some(d) => {
                    if let Started::Empty = self.start(d, Some(parent)) {
                        pending = Some(None);
                    }
                }
                None => {
                    let success = match frame {
                        Frame::Atom { vertex, .. } => !self.arena.children(*vertex).is_empty(),
                        Frame::Rule { .. } => true,
                    };
                    let done = self.finish(success);
                    if self.stack.is_empty() {
                        result = done;
                    }
                    pending = Some(done);
                }
            }
        }
        match result {
            Some(_) => self.arena,
            None => VertexLabeledTree::empty(),
        }
    }
}

/// Builds the and-or explanation tree of `d` with respect to `x`, avoiding
/// the atoms in `l`. Returns the empty tree when no explanation exists.
///
/// The construction keeps an explicit stack, so deep derivation chains do not
/// consume native stack. Vertex ids are assigned in pre-order.
pub fn create_tree<S: RuleSource + ?Sized>(
    source: &S,
    x: &AtomSet,
    d: &Explanandum,
    l: &AtomSet,
) -> Result<VertexLabeledTree, ExplainError> {
    match d {
        Explanandum::Atom(p) if !x.contains(p) => return Err(ExplainError::AtomNotInAnswerSet(p.clone())),
        Explanandum::Rule(r) if !source.contains(r) => return Err(ExplainError::UnknownExplanandum(r.canonical())),
        _ => {}
    }
    let builder = Builder { source, x, arena: VertexLabeledTree::empty(), stack: Vec::new(), path: l.clone() };
    Ok(builder.run(d.clone()))
}

/// A non-empty and-or explanation tree rooted at an atom.
#[derive(Debug, Clone)]
pub struct AndOrTree {
    id: TreeId,
    tree: VertexLabeledTree,
}

impl AndOrTree {
    /// The and-or tree of `p` in `x`, or `None` when it is empty.
    pub fn build<S: RuleSource + ?Sized>(source: &S, x: &AtomSet, p: &Atom) -> Result<Option<Self>, ExplainError> {
        let tree = create_tree(source, x, &Explanandum::Atom(p.clone()), &AtomSet::new())?;
        Ok(Self::from_tree(tree))
    }

    /// Wraps a tree produced by [`create_tree`] for an atom.
    pub fn from_tree(tree: VertexLabeledTree) -> Option<Self> {
        match tree.root().map(|r| tree.label(r)) {
            Some(Label::Atom(_)) => Some(AndOrTree { id: TreeId::fresh(), tree }),
            _ => None,
        }
    }

    pub fn id(&self) -> TreeId {
        self.id
    }

    pub fn tree(&self) -> &VertexLabeledTree {
        &self.tree
    }

    pub fn root_atom(&self) -> &Atom {
        self.tree.label(0).as_atom().expect("root is an atom vertex")
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    pub fn is_rule_vertex(&self, v: VertexId) -> bool {
        self.tree.label(v).is_rule()
    }

    pub fn rule_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.tree.vertex_ids().filter(|&v| self.is_rule_vertex(v))
    }

    /// Whether `candidate` is an explanation tree of this and-or tree: its
    /// labels embed into this tree root to root, every atom vertex keeps
    /// exactly one rule child and every rule vertex keeps all of its children.
    pub fn admits(&self, candidate: &VertexLabeledTree) -> bool {
        let Some(croot) = candidate.root() else { return false };
        if candidate.label(croot) != self.tree.label(0) {
            return false;
        }
        let mut stack = vec![(0usize, croot)];
        while let Some((v, c)) = stack.pop() {
            let ckids = candidate.children(c);
            let vkids = self.tree.children(v);
            match self.tree.label(v) {
                Label::Atom(_) => {
                    let [ck] = ckids else { return false };
                    let Some(&vk) = vkids.iter().find(|&&k| self.tree.label(k) == candidate.label(*ck)) else {
                        return false;
                    };
                    stack.push((vk, *ck));
                }
                Label::Rule(_) => {
                    if ckids.len() != vkids.len() {
                        return false;
                    }
                    // Children of a rule vertex carry distinct body atoms.
                    for &vk in vkids {
                        let Some(&ck) = ckids.iter().find(|&&k| candidate.label(k) == self.tree.label(vk)) else {
                            return false;
                        };
                        stack.push((vk, ck));
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grounder::GroundIndex;
    use crate::io::{parse_answer_set, parse_program};

    fn setup(program: &str, x: &str) -> (GroundIndex, AtomSet) {
        (GroundIndex::new(&parse_program(program).unwrap()), parse_answer_set(x).unwrap())
    }

    #[test]
    fn example_tree_shape() {
        let (idx, x) = setup("a :- b, c. a :- d. d. b :- c. c.", "a b c d");
        let t = AndOrTree::build(&idx, &x, &Atom::prop("a")).unwrap().unwrap();
        let texts: Vec<String> = t.tree().preorder().iter().map(|&v| t.tree().label(v).text()).collect();
        assert_eq!(texts, vec!["a", "a :- b, c.", "b", "b :- c.", "c", "c.", "c", "c.", "a :- d.", "d", "d."]);
        assert_eq!(t.tree().preorder(), (0..t.len()).collect::<Vec<_>>());
    }

    #[test]
    fn cycles_are_cut() {
        let (idx, x) = setup("a :- b. b :- a. a :- c. c.", "a b c");
        let t = AndOrTree::build(&idx, &x, &Atom::prop("a")).unwrap().unwrap();
        let texts: Vec<String> = t.tree().preorder().iter().map(|&v| t.tree().label(v).text()).collect();
        assert_eq!(texts, vec!["a", "a :- c.", "c", "c."]);
    }

    #[test]
    fn unsupported_atom_gives_empty_tree() {
        let (idx, x) = setup("a :- b. b :- a.", "a b");
        assert!(AndOrTree::build(&idx, &x, &Atom::prop("a")).unwrap().is_none());
    }

    #[test]
    fn errors() {
        let (idx, x) = setup("a.", "a");
        assert!(matches!(AndOrTree::build(&idx, &x, &Atom::prop("z")), Err(ExplainError::AtomNotInAnswerSet(_))));
        let foreign = Explanandum::Rule(Arc::new(Rule::fact(Atom::prop("q"))));
        assert!(matches!(create_tree(&idx, &x, &foreign, &AtomSet::new()), Err(ExplainError::UnknownExplanandum(_))));
    }

    #[test]
    fn rule_explanandum() {
        let (idx, x) = setup("a :- b. b.", "a b");
        let r = Explanandum::Rule(Arc::new(crate::io::parse_rule("a :- b.").unwrap()));
        let t = create_tree(&idx, &x, &r, &AtomSet::new()).unwrap();
        assert_eq!(t.len(), 3);
        let blocked = create_tree(&idx, &x, &r, &parse_answer_set("b").unwrap()).unwrap();
        assert!(blocked.is_empty());
    }

    #[test]
    fn deep_chain_does_not_overflow() {
        let n = 20_000;
        let mut text = String::from("p0.\n");
        for i in 1..=n {
            text.push_str(&format!("p{i} :- p{}.\n", i - 1));
        }
        let program = parse_program(&text).unwrap();
        let x: AtomSet = (0..=n).map(|i| Atom::prop(format!("p{i}"))).collect();
        let idx = GroundIndex::new(&program);
        let t = AndOrTree::build(&idx, &x, &Atom::prop(format!("p{n}"))).unwrap().unwrap();
        assert_eq!(t.len(), 2 * (n + 1));
    }
}
