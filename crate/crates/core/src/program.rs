//! Ground normal programs with body cardinality expressions, and the
//! semantic primitives the rest of the crate builds on.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

/// Sets of ground atoms are kept ordered so every traversal is deterministic.
pub type AtomSet = BTreeSet<Atom>;

/// Default limit on the Herbrand base size accepted by [`is_answer_set`].
pub const DEFAULT_VERIFY_CAP: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProgramError {
    #[error("non-ground cardinality expression: {0}")]
    NonGroundCardinality(String),
    #[error("non-ground rule: {0}")]
    NonGroundRule(String),
    #[error("instance too large for exhaustive verification ({size} atoms, cap {cap})")]
    TooLarge { size: usize, cap: usize },
    #[error("cardinality expressions are not supported here: {0}")]
    CardinalityNotSupported(String),
    #[error("cardinality bounds out of order: lower {lower} > upper {upper}")]
    BoundsOutOfOrder { lower: u32, upper: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// Bare lowercase identifier.
    Symbol(String),
    Integer(i64),
    /// Double-quoted string, stored unescaped.
    Str(String),
    Variable(String),
}

impl Term {
    pub fn symbol(name: impl Into<String>) -> Self {
        Term::Symbol(name.into())
    }

    pub fn string(value: impl Into<String>) -> Self {
        Term::Str(value.into())
    }

    pub fn variable(name: impl Into<String>) -> Self {
        Term::Variable(name.into())
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable(_))
    }

    /// The value as a reader would say it: strings lose their quotes.
    pub fn plain_text(&self) -> String {
        match self {
            Term::Symbol(s) | Term::Str(s) | Term::Variable(s) => s.clone(),
            Term::Integer(i) => i.to_string(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Symbol(s) | Term::Variable(s) => f.write_str(s),
            Term::Integer(i) => write!(f, "{i}"),
            Term::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom { predicate: predicate.into(), args }
    }

    pub fn prop(predicate: impl Into<String>) -> Self {
        Atom::new(predicate, Vec::new())
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        !self.args.iter().any(Term::is_variable)
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Variable(v) => Some(v.as_str()),
            _ => None,
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// `lower <= |X ∩ atoms| <= upper`, with `upper == None` meaning unbounded.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CardinalityExpression {
    pub lower: u32,
    pub upper: Option<u32>,
    pub atoms: Vec<Atom>,
}

impl CardinalityExpression {
    pub fn new(lower: u32, upper: Option<u32>, atoms: Vec<Atom>) -> Result<Self, ProgramError> {
        if let Some(u) = upper {
            if lower > u {
                return Err(ProgramError::BoundsOutOfOrder { lower, upper: u });
            }
        }
        let mut atoms = atoms;
        dedup_preserving_order(&mut atoms);
        Ok(CardinalityExpression { lower, upper, atoms })
    }

    pub fn is_ground(&self) -> bool {
        self.atoms.iter().all(Atom::is_ground)
    }

    fn count_in(&self, x: &AtomSet) -> usize {
        self.atoms.iter().filter(|a| x.contains(*a)).count()
    }

    fn holds_for_count(&self, n: usize) -> bool {
        n >= self.lower as usize && self.upper.is_none_or(|u| n <= u as usize)
    }
}

impl fmt::Display for CardinalityExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lower > 0 {
            write!(f, "{} ", self.lower)?;
        }
        f.write_str("{")?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")?;
        if let Some(u) = self.upper {
            write!(f, " {u}")?;
        }
        Ok(())
    }
}

/// A rule `head :- pos, not neg, card.`; `head == None` is a constraint.
///
/// Equality and hashing are structural and ignore `source`.
#[derive(Debug, Clone)]
pub struct Rule {
    pub head: Option<Atom>,
    pub pos: Vec<Atom>,
    pub neg: Vec<Atom>,
    pub card: Vec<CardinalityExpression>,
    /// Verbatim text used for display.
    pub source: String,
}

impl Rule {
    /// Builds a rule, removing repeated body literals. `source` defaults to
    /// the canonical rendering.
    pub fn new(head: Option<Atom>, pos: Vec<Atom>, neg: Vec<Atom>, card: Vec<CardinalityExpression>) -> Self {
        let mut rule = Rule { head, pos, neg, card, source: String::new() };
        dedup_preserving_order(&mut rule.pos);
        dedup_preserving_order(&mut rule.neg);
        dedup_preserving_order(&mut rule.card);
        rule.source = rule.to_string();
        rule
    }

    pub fn fact(head: Atom) -> Self {
        Rule::new(Some(head), Vec::new(), Vec::new(), Vec::new())
    }

    pub fn normal(head: Atom, pos: Vec<Atom>, neg: Vec<Atom>) -> Self {
        Rule::new(Some(head), pos, neg, Vec::new())
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }

    pub fn is_fact(&self) -> bool {
        self.head.is_some() && self.pos.is_empty() && self.neg.is_empty() && self.card.is_empty()
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_none()
    }

    pub fn is_ground(&self) -> bool {
        self.head.as_ref().is_none_or(Atom::is_ground)
            && self.pos.iter().all(Atom::is_ground)
            && self.neg.iter().all(Atom::is_ground)
            && self.card.iter().all(CardinalityExpression::is_ground)
    }

    /// Every atom occurring anywhere in the rule.
    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.head
            .iter()
            .chain(self.pos.iter())
            .chain(self.neg.iter())
            .chain(self.card.iter().flat_map(|c| c.atoms.iter()))
    }

    /// Canonical text, parseable back to a structurally equal rule.
    pub fn canonical(&self) -> String {
        self.to_string()
    }

    /// `r` without its negative body, or `None` when `interp` blocks it.
    pub fn reduct(&self, interp: &AtomSet) -> Option<Rule> {
        if self.neg.iter().any(|a| interp.contains(a)) {
            return None;
        }
        Some(Rule::new(self.head.clone(), self.pos.clone(), Vec::new(), self.card.clone()))
    }

    /// Whether `x` satisfies the rule read as a formula.
    pub fn satisfied_by(&self, x: &AtomSet) -> bool {
        let body = self.pos.iter().all(|a| x.contains(a))
            && !self.neg.iter().any(|a| x.contains(a))
            && self.card.iter().all(|c| c.holds_for_count(c.count_in(x)));
        !body || self.head.as_ref().is_some_and(|h| x.contains(h))
    }
}

impl PartialEq for Rule {
    fn eq(&self, other: &Self) -> bool {
        self.head == other.head && self.pos == other.pos && self.neg == other.neg && self.card == other.card
    }
}

impl Eq for Rule {}

impl Hash for Rule {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.head.hash(state);
        self.pos.hash(state);
        self.neg.hash(state);
        self.card.hash(state);
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(h) = &self.head {
            write!(f, "{h}")?;
        }
        let body: Vec<String> = self
            .pos
            .iter()
            .map(|a| a.to_string())
            .chain(self.neg.iter().map(|a| format!("not {a}")))
            .chain(self.card.iter().map(|c| c.to_string()))
            .collect();
        if !body.is_empty() {
            if self.head.is_some() {
                f.write_str(" ")?;
            }
            write!(f, ":- {}", body.join(", "))?;
        } else if self.head.is_none() {
            f.write_str(":-")?;
        }
        f.write_str(".")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub rules: Vec<Rule>,
}

impl Program {
    pub fn new(rules: Vec<Rule>) -> Self {
        Program { rules }
    }

    /// Drops structurally repeated rules; the first occurrence keeps its source text.
    pub fn deduplicated(&self) -> Program {
        let mut rules = self.rules.clone();
        dedup_preserving_order(&mut rules);
        Program { rules }
    }

    pub fn is_ground(&self) -> bool {
        self.rules.iter().all(Rule::is_ground)
    }

    pub fn has_cardinality(&self) -> bool {
        self.rules.iter().any(|r| !r.card.is_empty())
    }

    /// Constants occurring in the program.
    pub fn herbrand_universe(&self) -> BTreeSet<Term> {
        self.rules
            .iter()
            .flat_map(Rule::atoms)
            .flat_map(|a| a.args.iter())
            .filter(|t| !t.is_variable())
            .cloned()
            .collect()
    }

    /// Ground atoms occurring in the program.
    pub fn herbrand_base(&self) -> AtomSet {
        self.rules.iter().flat_map(Rule::atoms).filter(|a| a.is_ground()).cloned().collect()
    }

    /// Atoms that occur under default negation.
    pub fn negated_atoms(&self) -> AtomSet {
        self.rules.iter().flat_map(|r| r.neg.iter()).cloned().collect()
    }

    fn ensure_ground(&self) -> Result<(), ProgramError> {
        match self.rules.iter().find(|r| !r.is_ground()) {
            Some(r) => Err(ProgramError::NonGroundRule(r.source.clone())),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

pub fn satisfies_card(x: &AtomSet, c: &CardinalityExpression) -> Result<bool, ProgramError> {
    if !c.is_ground() {
        return Err(ProgramError::NonGroundCardinality(c.to_string()));
    }
    Ok(c.holds_for_count(c.count_in(x)))
}

/// `{ H(r) :- B+(r) | r ∈ P, I ∩ B−(r) = ∅ }`; cardinality expressions stay in place.
pub fn reduct(program: &Program, interp: &AtomSet) -> Result<Program, ProgramError> {
    program.ensure_ground()?;
    Ok(Program::new(program.rules.iter().filter_map(|r| r.reduct(interp)).collect()))
}

/// Outcome of checking a candidate answer set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    AnswerSet,
    /// A rule of the reduct the candidate does not satisfy.
    UnsatisfiedRule(Rule),
    /// A strictly smaller model of the reduct, so the candidate is not minimal.
    NotMinimal(AtomSet),
}

impl Verdict {
    pub fn is_answer_set(&self) -> bool {
        matches!(self, Verdict::AnswerSet)
    }
}

/// Exhaustive Gelfond-Lifschitz check over every subset of `interp`.
pub fn check_answer_set(program: &Program, interp: &AtomSet, cap: usize) -> Result<Verdict, ProgramError> {
    program.ensure_ground()?;
    if let Some(r) = program.rules.iter().find(|r| !r.card.is_empty()) {
        return Err(ProgramError::CardinalityNotSupported(r.source.clone()));
    }
    let mut universe = program.herbrand_base();
    universe.extend(interp.iter().cloned());
    if universe.len() > cap || interp.len() >= usize::BITS as usize {
        return Err(ProgramError::TooLarge { size: universe.len(), cap });
    }

    let red = reduct(program, interp)?;
    if let Some(r) = red.rules.iter().find(|r| !r.satisfied_by(interp)) {
        return Ok(Verdict::UnsatisfiedRule(r.clone()));
    }

    // Subsets of `interp` as bitmasks over its members.
    let members: Vec<&Atom> = interp.iter().collect();
    let index = |a: &Atom| members.iter().position(|m| *m == a);
    struct Compiled {
        head: Option<Option<usize>>,
        pos: usize,
    }
    let compiled: Vec<Compiled> = red
        .rules
        .iter()
        .filter_map(|r| {
            let mut mask = 0usize;
            for a in &r.pos {
                // A body atom outside `interp` is false in every subset.
                mask |= 1 << index(a)?;
            }
            Some(Compiled { head: r.head.as_ref().map(index), pos: mask })
        })
        .collect();
    let full = (1usize << members.len()) - 1;
    for subset in 0..full {
        let model = compiled.iter().all(|c| {
            if subset & c.pos != c.pos {
                return true;
            }
            matches!(c.head, Some(Some(h)) if subset & (1 << h) != 0)
        });
        if model {
            let smaller = members.iter().enumerate().filter(|(i, _)| subset & (1 << i) != 0).map(|(_, a)| (*a).clone());
            return Ok(Verdict::NotMinimal(smaller.collect()));
        }
    }
    Ok(Verdict::AnswerSet)
}

pub fn is_answer_set(program: &Program, interp: &AtomSet, cap: usize) -> Result<bool, ProgramError> {
    check_answer_set(program, interp, cap).map(|v| v.is_answer_set())
}

/// `r` supports `p` using atoms in `y` but not in `z`.
pub fn supports(rule: &Rule, p: &Atom, y: &AtomSet, z: &AtomSet) -> bool {
    rule.head.as_ref() == Some(p)
        && rule.pos.iter().all(|a| y.contains(a) && !z.contains(a))
        && !rule.neg.iter().any(|a| y.contains(a))
        && rule.card.iter().all(|c| c.holds_for_count(c.count_in(y)))
}

pub fn supporting_rules<'a>(program: &'a Program, p: &Atom, y: &AtomSet, z: &AtomSet) -> Vec<&'a Rule> {
    program.rules.iter().filter(|r| supports(r, p, y, z)).collect()
}

pub(crate) fn dedup_preserving_order<T: Eq + Hash + Clone>(items: &mut Vec<T>) {
    let mut seen = std::collections::HashSet::new();
    items.retain(|x| seen.insert(x.clone()));
}
