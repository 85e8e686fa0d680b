//! Random program generation and brute-force answer-set search shared by
//! the integration tests.

#![allow(dead_code)]

use aspexplain::grounder::ground_program;
use aspexplain::program::{is_answer_set, Atom, AtomSet, Program, Rule, Term};
use aspexplain::wf::well_founded_model;
use rand::seq::SliceRandom;
use rand::Rng;

pub const MAX_ATOMS: usize = 8;
pub const MAX_RULES: usize = 12;

fn pick<R: Rng>(rng: &mut R, pool: &[Atom], max: usize) -> Vec<Atom> {
    let n = rng.gen_range(0..=max);
    pool.choose_multiple(rng, n).cloned().collect()
}

/// A ground normal program over at most [`MAX_ATOMS`] propositional atoms
/// with at most [`MAX_RULES`] rules.
pub fn random_ground_program<R: Rng>(rng: &mut R) -> Program {
    let n_atoms = rng.gen_range(2..=MAX_ATOMS);
    let atoms: Vec<Atom> = (0..n_atoms).map(|i| Atom::prop(format!("p{i}"))).collect();
    let n_rules = rng.gen_range(1..=MAX_RULES);
    let rules = (0..n_rules)
        .map(|_| {
            let head = atoms.choose(rng).unwrap().clone();
            let pos = if rng.gen_bool(0.3) { Vec::new() } else { pick(rng, &atoms, 2) };
            let neg = if rng.gen_bool(0.6) { Vec::new() } else { pick(rng, &atoms, 2) };
            Rule::normal(head, pos, neg)
        })
        .collect();
    Program::new(rules)
}

/// A safe non-ground program with unary predicates over two constants, so
/// its Herbrand base has at most [`MAX_ATOMS`] atoms.
pub fn random_nonground_program<R: Rng>(rng: &mut R) -> Program {
    let preds = ["p", "q", "r", "s"];
    let consts = [Term::symbol("a"), Term::symbol("b")];
    let x = Term::variable("X");
    let unary = |p: &str, t: &Term| Atom::new(p, vec![t.clone()]);
    let mut rules = vec![Rule::fact(unary("p", consts.choose(rng).unwrap()))];
    for _ in 0..rng.gen_range(1..MAX_RULES) {
        let ground = rng.gen_bool(0.25);
        let term = if ground { consts.choose(rng).unwrap().clone() } else { x.clone() };
        let head = unary(preds.choose(rng).unwrap(), &term);
        let mut pos = vec![unary(preds.choose(rng).unwrap(), &term)];
        if rng.gen_bool(0.3) {
            pos.push(unary(preds.choose(rng).unwrap(), consts.choose(rng).unwrap()));
        }
        let neg = if rng.gen_bool(0.5) { vec![unary(preds.choose(rng).unwrap(), &term)] } else { Vec::new() };
        rules.push(Rule::normal(head, pos, neg));
    }
    Program::new(rules)
}

fn least_model_of_reduct(program: &Program, x: &AtomSet) -> AtomSet {
    let reduct: Vec<&Rule> = program.rules.iter().filter(|r| !r.neg.iter().any(|a| x.contains(a))).collect();
    let mut m = AtomSet::new();
    loop {
        let before = m.len();
        for r in &reduct {
            if let Some(h) = &r.head {
                if r.pos.iter().all(|a| m.contains(a)) {
                    m.insert(h.clone());
                }
            }
        }
        if m.len() == before {
            return m;
        }
    }
}

/// Every answer set of a ground program, by trying every subset of its base.
/// Candidates are filtered cheaply and then confirmed with `is_answer_set`.
pub fn answer_sets(program: &Program) -> Vec<AtomSet> {
    let base: Vec<Atom> = program.herbrand_base().into_iter().collect();
    assert!(base.len() <= 16, "base too large for exhaustive search");
    let mut out = Vec::new();
    for mask in 0u32..(1 << base.len()) {
        let x: AtomSet =
            base.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, a)| a.clone()).collect();
        if least_model_of_reduct(program, &x) != x {
            continue;
        }
        assert!(is_answer_set(program, &x, 20).unwrap(), "filter and checker disagree");
        out.push(x);
    }
    out
}

/// Draws ground programs until one has an answer set.
pub fn program_with_answer_sets<R: Rng>(rng: &mut R) -> (Program, Vec<AtomSet>) {
    loop {
        let p = random_ground_program(rng);
        let sets = answer_sets(&p);
        if !sets.is_empty() {
            return (p, sets);
        }
    }
}

/// Draws non-ground programs until one has an answer set; returns the
/// program, its eager grounding and the answer sets.
pub fn nonground_with_answer_sets<R: Rng>(rng: &mut R) -> (Program, Program, Vec<AtomSet>) {
    loop {
        let p = random_nonground_program(rng);
        let g = ground_program(&p).expect("generated programs are safe");
        let sets = answer_sets(&g);
        if !sets.is_empty() {
            return (p, g, sets);
        }
    }
}

/// The well-founded model of a positive program is its least model.
pub fn least_model(program: &Program) -> AtomSet {
    well_founded_model(program).expect("normal program").pos
}
