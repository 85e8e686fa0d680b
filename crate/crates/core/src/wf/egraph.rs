use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::program::{Atom, AtomSet, Program, Rule};

use super::WfError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

/// A node of an e-graph: an annotated atom or one of the three markers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ENode {
    Pos(Atom),
    Neg(Atom),
    Assume,
    Top,
    Bottom,
}

impl ENode {
    pub fn is_marker(&self) -> bool {
        matches!(self, ENode::Assume | ENode::Top | ENode::Bottom)
    }

    pub fn atom(&self) -> Option<&Atom> {
        match self {
            ENode::Pos(a) | ENode::Neg(a) => Some(a),
            _ => None,
        }
    }
}

impl fmt::Display for ENode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ENode::Pos(a) => write!(f, "{a}+"),
            ENode::Neg(a) => write!(f, "{a}-"),
            ENode::Assume => f.write_str("assume"),
            ENode::Top => f.write_str("⊤"),
            ENode::Bottom => f.write_str("⊥"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Literal {
    Pos(Atom),
    Neg(Atom),
}

/// The support of a node: one marker, or the literals its edges point to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Support {
    Assume,
    Top,
    Bottom,
    Literals(BTreeSet<Literal>),
}

/// A labeled directed graph over annotated atoms and markers. Nodes and edges
/// are kept sorted, so iteration order is deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EGraph {
    nodes: BTreeSet<ENode>,
    edges: BTreeSet<(ENode, ENode, Sign)>,
}

impl EGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, n: ENode) {
        self.nodes.insert(n);
    }

    /// Adds an edge together with both of its endpoints.
    pub fn add_edge(&mut self, from: ENode, to: ENode, sign: Sign) {
        self.nodes.insert(from.clone());
        self.nodes.insert(to.clone());
        self.edges.insert((from, to, sign));
    }

    pub fn nodes(&self) -> &BTreeSet<ENode> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<(ENode, ENode, Sign)> {
        &self.edges
    }

    pub fn contains(&self, n: &ENode) -> bool {
        self.nodes.contains(n)
    }

    pub fn out_edges<'a>(&'a self, n: &'a ENode) -> impl Iterator<Item = (&'a ENode, Sign)> + 'a {
        self.edges.iter().filter(move |(f, _, _)| f == n).map(|(_, t, s)| (t, *s))
    }

    fn out_map(&self) -> HashMap<&ENode, Vec<(&ENode, Sign)>> {
        let mut m: HashMap<&ENode, Vec<(&ENode, Sign)>> = HashMap::new();
        for (f, t, s) in &self.edges {
            m.entry(f).or_default().push((t, *s));
        }
        m
    }

    /// Checks the four structural e-graph conditions.
    pub fn check_structure(&self) -> Result<(), String> {
        let out = self.out_map();
        for n in &self.nodes {
            let edges = out.get(n).map_or(&[][..], Vec::as_slice);
            if n.is_marker() {
                if !edges.is_empty() {
                    return Err(format!("marker {n} has out-going edges"));
                }
                continue;
            }
            if edges.is_empty() {
                return Err(format!("{n} is a sink"));
            }
            for &(t, s) in edges {
                match (n, t, s) {
                    (ENode::Pos(_), ENode::Assume | ENode::Bottom, Sign::Minus) => {
                        return Err(format!("{n} has a negative edge to {t}"))
                    }
                    (ENode::Neg(_), ENode::Assume | ENode::Top, Sign::Plus) => {
                        return Err(format!("{n} has a positive edge to {t}"))
                    }
                    _ => {}
                }
                if t.is_marker() && edges.len() > 1 {
                    return Err(format!("the edge from {n} to {t} is not its only out-going edge"));
                }
            }
        }
        for (f, t, _) in &self.edges {
            if !self.nodes.contains(f) || !self.nodes.contains(t) {
                return Err(format!("edge {f} -> {t} has an endpoint outside the node set"));
            }
        }
        Ok(())
    }

    pub fn is_egraph(&self) -> bool {
        self.check_structure().is_ok()
    }

    pub fn support_of(&self, b: &ENode) -> Result<Support, WfError> {
        if !self.nodes.contains(b) || b.is_marker() {
            return Err(WfError::NodeNotInGraph(b.to_string()));
        }
        let mut lits = BTreeSet::new();
        for (t, s) in self.out_edges(b) {
            match t {
                ENode::Assume => return Ok(Support::Assume),
                ENode::Top => return Ok(Support::Top),
                ENode::Bottom => return Ok(Support::Bottom),
                ENode::Pos(a) | ENode::Neg(a) => {
                    lits.insert(match s {
                        Sign::Plus => Literal::Pos(a.clone()),
                        Sign::Minus => Literal::Neg(a.clone()),
                    });
                }
            }
        }
        Ok(Support::Literals(lits))
    }
}

/// A complete interpretation `(m, everything else)` together with a set `u`
/// of atoms assumed false.
#[derive(Debug, Clone, Copy)]
pub struct Context<'a> {
    pub m: &'a AtomSet,
    pub u: &'a AtomSet,
}

impl Context<'_> {
    fn is_true(&self, a: &Atom) -> bool {
        self.m.contains(a)
    }

    fn is_false_or_assumed(&self, a: &Atom) -> bool {
        !self.m.contains(a) || self.u.contains(a)
    }
}

fn rules_with_head<'p>(program: &'p Program, b: &'p Atom) -> impl Iterator<Item = &'p Rule> + 'p {
    program.rules.iter().filter(move |r| r.head.as_ref() == Some(b))
}

fn body_literals(r: &Rule) -> BTreeSet<Literal> {
    r.pos.iter().cloned().map(Literal::Pos).chain(r.neg.iter().cloned().map(Literal::Neg)).collect()
}

/// Whether `s` is a local consistent explanation of `b` being true.
pub fn is_positive_lce(program: &Program, b: &Atom, s: &Support, ctx: Context<'_>) -> bool {
    if !ctx.is_true(b) {
        return false;
    }
    let lits = match s {
        Support::Assume => return true,
        Support::Bottom => return false,
        Support::Top => BTreeSet::new(),
        Support::Literals(l) if l.is_empty() => return false,
        Support::Literals(l) => l.clone(),
    };
    let consistent = lits.iter().all(|l| match l {
        Literal::Pos(a) => ctx.is_true(a),
        Literal::Neg(a) => ctx.is_false_or_assumed(a),
    });
    consistent && rules_with_head(program, b).any(|r| r.card.is_empty() && body_literals(r) == lits)
}

fn hits(r: &Rule, lits: &BTreeSet<Literal>) -> bool {
    r.pos.iter().any(|a| lits.contains(&Literal::Pos(a.clone())))
        || r.neg.iter().any(|a| lits.contains(&Literal::Neg(a.clone())))
}

fn hits_all(program: &Program, b: &Atom, lits: &BTreeSet<Literal>) -> bool {
    rules_with_head(program, b).all(|r| hits(r, lits))
}

/// Whether `s` is a local consistent explanation of `b` being false.
///
/// Hitting every rule is monotone in `s`, so minimality only needs the
/// removal of each single literal to be checked.
pub fn is_negative_lce(program: &Program, b: &Atom, s: &Support, ctx: Context<'_>) -> bool {
    if !ctx.is_false_or_assumed(b) {
        return false;
    }
    let lits = match s {
        Support::Assume => return true,
        Support::Top => return false,
        Support::Bottom => BTreeSet::new(),
        Support::Literals(l) if l.is_empty() => return false,
        Support::Literals(l) => l.clone(),
    };
    let consistent = lits.iter().all(|l| match l {
        Literal::Pos(a) => ctx.is_false_or_assumed(a),
        Literal::Neg(a) => ctx.is_true(a),
    });
    if !consistent || !hits_all(program, b, &lits) {
        return false;
    }
    lits.iter().all(|l| {
        let mut smaller = lits.clone();
        smaller.remove(l);
        !hits_all(program, b, &smaller)
    })
}

/// Every negative LCE of `b` other than `{assume}`, found by exhaustive
/// search over the consistent literals of the rules for `b`.
pub fn negative_lces(program: &Program, b: &Atom, ctx: Context<'_>, cap_bits: usize) -> Result<Vec<Support>, WfError> {
    if !ctx.is_false_or_assumed(b) {
        return Ok(Vec::new());
    }
    let candidates: Vec<Literal> = rules_with_head(program, b)
        .flat_map(|r| {
            r.pos
                .iter()
                .filter(|a| ctx.is_false_or_assumed(a))
                .cloned()
                .map(Literal::Pos)
                .chain(r.neg.iter().filter(|a| ctx.is_true(a)).cloned().map(Literal::Neg))
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if candidates.len() > cap_bits {
        return Err(WfError::CapExceeded { what: "candidate literals", size: candidates.len(), cap: cap_bits });
    }
    let mut hitting: Vec<BTreeSet<Literal>> = Vec::new();
    for mask in 0u64..(1 << candidates.len()) {
        let s: BTreeSet<Literal> =
            candidates.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, l)| l.clone()).collect();
        if hits_all(program, b, &s) {
            hitting.push(s);
        }
    }
    let minimal = hitting.iter().filter(|s| !hitting.iter().any(|t| t.len() < s.len() && t.is_subset(s)));
    Ok(minimal.map(|s| if s.is_empty() { Support::Bottom } else { Support::Literals(s.clone()) }).collect())
}

/// Explains why `g` is not an offline justification of `b` with respect to
/// the answer set `m` and assumptions `u`.
pub fn check_offline_justification(
    program: &Program,
    g: &EGraph,
    b: &ENode,
    m: &AtomSet,
    u: &AtomSet,
) -> Result<(), String> {
    g.check_structure()?;
    if !g.contains(b) || b.is_marker() {
        return Err(format!("{b} is not an annotated node of the graph"));
    }
    let out = g.out_map();

    let mut seen: BTreeSet<&ENode> = BTreeSet::from([b]);
    let mut queue = VecDeque::from([b]);
    while let Some(n) = queue.pop_front() {
        for &(t, _) in out.get(n).map_or(&[][..], Vec::as_slice) {
            if seen.insert(t) {
                queue.push_back(t);
            }
        }
    }
    if let Some(n) = g.nodes().iter().find(|n| !seen.contains(n)) {
        return Err(format!("{n} is not reachable from {b}"));
    }

    let ctx = Context { m, u };
    for n in g.nodes() {
        let support = match n {
            ENode::Pos(_) | ENode::Neg(_) => g.support_of(n).map_err(|e| e.to_string())?,
            _ => continue,
        };
        let ok = match n {
            ENode::Pos(a) => is_positive_lce(program, a, &support, ctx),
            ENode::Neg(a) => is_negative_lce(program, a, &support, ctx),
            _ => unreachable!(),
        };
        if !ok {
            return Err(format!("the support of {n} is not a local consistent explanation"));
        }
        let assumed = g.edges().contains(&(n.clone(), ENode::Assume, Sign::Minus));
        match n {
            ENode::Pos(_) if g.edges().contains(&(n.clone(), ENode::Assume, Sign::Plus)) => {
                return Err(format!("true atom {n} is assumed"));
            }
            ENode::Neg(a) if assumed != u.contains(a) => {
                return Err(if assumed {
                    format!("{n} is assumed but not in the assumption set")
                } else {
                    format!("{n} is in the assumption set but not assumed")
                });
            }
            _ => {}
        }
    }

    for start in g.nodes().iter().filter(|n| matches!(n, ENode::Pos(_))) {
        if on_positive_cycle(&out, start) {
            return Err(format!("{start} lies on a positive cycle"));
        }
    }
    Ok(())
}

fn on_positive_cycle(out: &HashMap<&ENode, Vec<(&ENode, Sign)>>, start: &ENode) -> bool {
    let mut seen: BTreeSet<&ENode> = BTreeSet::new();
    let mut stack = vec![start];
    while let Some(n) = stack.pop() {
        for &(t, s) in out.get(n).map_or(&[][..], Vec::as_slice) {
            if s != Sign::Plus {
                continue;
            }
            if t == start {
                return true;
            }
            if seen.insert(t) {
                stack.push(t);
            }
        }
    }
    false
}

pub fn is_offline_justification(program: &Program, g: &EGraph, b: &ENode, m: &AtomSet, u: &AtomSet) -> bool {
    check_offline_justification(program, g, b, m, u).is_ok()
}
