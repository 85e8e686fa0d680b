//! Substitution grounder with an eager mode and a head-driven on-demand mode.
//!
//! Eager grounding substitutes every variable of a rule with every constant of
//! the Herbrand universe. On-demand grounding starts from a queried head atom,
//! unifies it with rule heads and only keeps instances whose positive body
//! lies inside the answer set (plus the program's facts). That filter is a
//! sound over-approximation of the rules that can support the queried atom.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::program::{dedup_preserving_order, Atom, AtomSet, CardinalityExpression, Program, Rule, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroundError {
    #[error("unsafe rule `{rule}`: variable {variable} does not occur in a positive body atom")]
    Unsafe { rule: String, variable: String },
    #[error("program has variables but no constants to substitute")]
    EmptyUniverse,
}

type Binding = HashMap<String, Term>;

#[derive(Debug)]
struct RuleTemplate<'a> {
    rule: &'a Rule,
    /// Variables bound by positive body atoms, in first-occurrence order.
    globals: Vec<String>,
}

/// Grounding context for one program: checks safety once and keeps the universe.
#[derive(Debug)]
pub struct Grounder<'a> {
    templates: Vec<RuleTemplate<'a>>,
    universe: Vec<Term>,
    facts: AtomSet,
}

impl<'a> Grounder<'a> {
    pub fn new(program: &'a Program) -> Result<Self, GroundError> {
        let universe: Vec<Term> = program.herbrand_universe().into_iter().collect();
        let mut templates = Vec::with_capacity(program.rules.len());
        let mut any_variable = false;
        for rule in &program.rules {
            let mut globals: Vec<String> = Vec::new();
            for v in rule.pos.iter().flat_map(Atom::variables) {
                if !globals.iter().any(|g| g == v) {
                    globals.push(v.to_string());
                }
            }
            let needs_binding = rule.head.iter().chain(rule.neg.iter()).flat_map(Atom::variables);
            for v in needs_binding {
                if !globals.iter().any(|g| g == v) {
                    return Err(GroundError::Unsafe { rule: rule.source.clone(), variable: v.to_string() });
                }
            }
            any_variable |= !rule.is_ground();
            templates.push(RuleTemplate { rule, globals });
        }
        if any_variable && universe.is_empty() {
            return Err(GroundError::EmptyUniverse);
        }
        let facts =
            program.rules.iter().filter(|r| r.is_fact() && r.is_ground()).filter_map(|r| r.head.clone()).collect();
        Ok(Grounder { templates, universe, facts })
    }

    pub fn universe(&self) -> &[Term] {
        &self.universe
    }

    /// All ground instances, in source-rule order with each rule's instances
    /// sorted by text, duplicates removed.
    pub fn ground_all(&self) -> Program {
        let mut rules = Vec::new();
        for t in &self.templates {
            if t.rule.is_ground() {
                rules.push(t.rule.clone());
                continue;
            }
            let mut instances = Vec::new();
            for_each_assignment(&t.globals, &self.universe, &mut Binding::new(), &mut |b| {
                instances.push(self.instantiate(t.rule, b));
            });
            sort_by_text(&mut instances);
            rules.extend(instances);
        }
        dedup_preserving_order(&mut rules);
        Program::new(rules)
    }

    /// Ground instances whose head is `head` and whose positive body lies in
    /// `answer_set` or among the facts.
    pub fn instantiate_for_head(&self, head: &Atom, answer_set: &AtomSet) -> Vec<Rule> {
        let mut available: HashMap<(&str, usize), Vec<&Atom>> = HashMap::new();
        for a in answer_set.iter().chain(self.facts.iter()) {
            available.entry((a.predicate.as_str(), a.arity())).or_default().push(a);
        }
        let universe: BTreeSet<&Term> = self.universe.iter().collect();

        let mut rules = Vec::new();
        for t in &self.templates {
            let Some(rule_head) = &t.rule.head else { continue };
            let mut binding = Binding::new();
            if !unify(rule_head, head, &mut binding) {
                continue;
            }
            if !binding.values().all(|v| universe.contains(v)) {
                continue;
            }
            if t.rule.is_ground() {
                if t.rule.pos.iter().all(|a| answer_set.contains(a) || self.facts.contains(a)) {
                    rules.push(t.rule.clone());
                }
                continue;
            }
            let mut instances = Vec::new();
            join(&t.rule.pos, &available, &universe, &mut binding, &mut |b| {
                instances.push(self.instantiate(t.rule, b));
            });
            sort_by_text(&mut instances);
            dedup_preserving_order(&mut instances);
            rules.extend(instances);
        }
        dedup_preserving_order(&mut rules);
        rules
    }

    fn instantiate(&self, rule: &Rule, binding: &Binding) -> Rule {
        let head = rule.head.as_ref().map(|a| substitute(a, binding));
        let pos = rule.pos.iter().map(|a| substitute(a, binding)).collect();
        let neg = rule.neg.iter().map(|a| substitute(a, binding)).collect();
        let card = rule.card.iter().map(|c| self.expand_card(c, binding)).collect();
        Rule::new(head, pos, neg, card)
    }

    /// Substitutes global variables and expands the remaining (local) ones
    /// over the universe.
    fn expand_card(&self, card: &CardinalityExpression, binding: &Binding) -> CardinalityExpression {
        let mut atoms = Vec::new();
        for atom in &card.atoms {
            let partial = substitute(atom, binding);
            let mut locals: Vec<String> = Vec::new();
            for v in partial.variables() {
                if !locals.iter().any(|l| l == v) {
                    locals.push(v.to_string());
                }
            }
            for_each_assignment(&locals, &self.universe, &mut Binding::new(), &mut |b| {
                atoms.push(substitute(&partial, b));
            });
        }
        CardinalityExpression { lower: card.lower, upper: card.upper, atoms: dedup(atoms) }
    }
}

fn dedup(mut atoms: Vec<Atom>) -> Vec<Atom> {
    dedup_preserving_order(&mut atoms);
    atoms
}

fn sort_by_text(rules: &mut [Rule]) {
    rules.sort_by_cached_key(Rule::canonical);
}

fn substitute(atom: &Atom, binding: &Binding) -> Atom {
    let args = atom
        .args
        .iter()
        .map(|t| match t {
            Term::Variable(v) => binding.get(v).cloned().unwrap_or_else(|| t.clone()),
            other => other.clone(),
        })
        .collect();
    Atom::new(atom.predicate.clone(), args)
}

/// Extends `binding` so that `pattern` becomes `ground`.
fn unify(pattern: &Atom, ground: &Atom, binding: &mut Binding) -> bool {
    if pattern.predicate != ground.predicate || pattern.arity() != ground.arity() {
        return false;
    }
    for (p, g) in pattern.args.iter().zip(&ground.args) {
        match p {
            Term::Variable(v) => match binding.get(v) {
                Some(bound) if bound != g => return false,
                Some(_) => {}
                None => {
                    binding.insert(v.clone(), g.clone());
                }
            },
            constant if constant != g => return false,
            _ => {}
        }
    }
    true
}

fn for_each_assignment(vars: &[String], universe: &[Term], binding: &mut Binding, visit: &mut dyn FnMut(&Binding)) {
    match vars.split_first() {
        None => visit(binding),
        Some((v, rest)) => {
            for c in universe {
                binding.insert(v.clone(), c.clone());
                for_each_assignment(rest, universe, binding, visit);
            }
            binding.remove(v);
        }
    }
}

/// Backtracking match of body atoms against the available ground atoms.
fn join(
    body: &[Atom],
    available: &HashMap<(&str, usize), Vec<&Atom>>,
    universe: &BTreeSet<&Term>,
    binding: &mut Binding,
    visit: &mut dyn FnMut(&Binding),
) {
    let Some((first, rest)) = body.split_first() else {
        visit(binding);
        return;
    };
    let Some(candidates) = available.get(&(first.predicate.as_str(), first.arity())) else {
        return;
    };
    for cand in candidates {
        let mut extended = binding.clone();
        if unify(first, cand, &mut extended) && extended.values().all(|v| universe.contains(v)) {
            join(rest, available, universe, &mut extended, visit);
        }
    }
}

pub fn ground_program(program: &Program) -> Result<Program, GroundError> {
    Ok(Grounder::new(program)?.ground_all())
}

pub fn instantiate_for_head(program: &Program, head: &Atom, answer_set: &AtomSet) -> Result<Vec<Rule>, GroundError> {
    Ok(Grounder::new(program)?.instantiate_for_head(head, answer_set))
}

/// Where the explanation engine gets candidate ground rules for a head atom.
pub trait RuleSource {
    /// Ground rules with head `head`, in a fixed order.
    fn rules_for(&self, head: &Atom) -> Arc<[Arc<Rule>]>;

    fn contains(&self, rule: &Rule) -> bool {
        rule.head.as_ref().is_some_and(|h| self.rules_for(h).iter().any(|r| **r == *rule))
    }
}

/// Head index over an already ground program.
#[derive(Debug, Clone)]
pub struct GroundIndex {
    by_head: HashMap<Atom, Arc<[Arc<Rule>]>>,
}

impl GroundIndex {
    /// Indexes a ground program, dropping duplicate rules.
    pub fn new(program: &Program) -> Self {
        let mut grouped: HashMap<Atom, Vec<Arc<Rule>>> = HashMap::new();
        for rule in program.deduplicated().rules {
            if let Some(h) = rule.head.clone() {
                grouped.entry(h).or_default().push(Arc::new(rule));
            }
        }
        let by_head = grouped.into_iter().map(|(k, v)| (k, Arc::from(v))).collect();
        GroundIndex { by_head }
    }
}

impl RuleSource for GroundIndex {
    fn rules_for(&self, head: &Atom) -> Arc<[Arc<Rule>]> {
        self.by_head.get(head).cloned().unwrap_or_else(|| Arc::from(Vec::new()))
    }
}

/// Instantiates rules lazily, one head atom at a time, memoizing the result.
#[derive(Debug)]
pub struct OnDemand<'a> {
    grounder: Grounder<'a>,
    answer_set: &'a AtomSet,
    cache: RefCell<HashMap<Atom, Arc<[Arc<Rule>]>>>,
}

impl<'a> OnDemand<'a> {
    pub fn new(program: &'a Program, answer_set: &'a AtomSet) -> Result<Self, GroundError> {
        Ok(OnDemand { grounder: Grounder::new(program)?, answer_set, cache: RefCell::default() })
    }
}

impl RuleSource for OnDemand<'_> {
    fn rules_for(&self, head: &Atom) -> Arc<[Arc<Rule>]> {
        if let Some(hit) = self.cache.borrow().get(head) {
            return hit.clone();
        }
        let rules: Arc<[Arc<Rule>]> =
            self.grounder.instantiate_for_head(head, self.answer_set).into_iter().map(Arc::new).collect();
        self.cache.borrow_mut().insert(head.clone(), rules.clone());
        rules
    }
}
