//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use aspexplain::explain::validate::check_and_or_tree;
use aspexplain::explain::{
    distance, enumerate_explanations, AndOrTree, Explanation, Label, RuleVertexSet, VertexLabeledTree,
    DEFAULT_ENUMERATION_CAP,
};
use aspexplain::grounder::{ground_program, GroundIndex, OnDemand, RuleSource};
use aspexplain::io::json::{parse_egraph_json, parse_tree_json};
use aspexplain::io::{parse_answer_set, parse_ground_atom, parse_lookup, parse_program, parse_rule};
use aspexplain::nl::render_nl;
use aspexplain::program::{reduct, Atom, AtomSet, Program};
use aspexplain::wf::{
    assumptions, check_offline_justification, explanation_to_justification, justification_to_explanation,
    tentative_assumptions, well_founded_model, EGraph, ENode, PartialInterpretation, Sign,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const STRUCTURE_BUDGET: Duration = Duration::from_millis(1);
const Q8_BUDGET: Duration = Duration::from_millis(10);
const PROPERTY_BUDGET: Duration = Duration::from_secs(60);
const RANDOM_PROGRAMS: usize = 500;
const ROUND_TRIP_CASES: usize = 100;
const SEED: u64 = 0x5eed_a5e7;
/// Timings take the best of this many runs, to keep scheduler noise out.
const TIMING_RUNS: usize = 5;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn load(program: &str, answer_set: &str) -> (Program, AtomSet) {
    (parse_program(&fixture(program)).unwrap(), parse_answer_set(&fixture(answer_set)).unwrap())
}

fn best_of<T>(mut f: impl FnMut() -> T) -> (T, Duration) {
    let mut best = Duration::MAX;
    let mut out = None;
    for _ in 0..TIMING_RUNS {
        let start = Instant::now();
        let v = f();
        best = best.min(start.elapsed());
        out = Some(v);
    }
    (out.unwrap(), best)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn texts(e: &Explanation) -> Vec<String> {
    e.vertices().iter().map(|v| v.rule.canonical()).collect()
}

fn tree_of<S: RuleSource + ?Sized>(s: &S, x: &AtomSet, p: &str) -> AndOrTree {
    AndOrTree::build(s, x, &parse_ground_atom(p).unwrap()).unwrap().expect("non-empty and-or tree")
}

fn criterion_1() -> Outcome {
    let (p, x) = load("basic.lp", "basic.as");
    let idx = GroundIndex::new(&p);
    let (t, time) = best_of(|| tree_of(&idx, &x, "a"));
    let tree = t.tree();
    ensure(tree.len() == 11, || format!("{} vertices", tree.len()))?;
    ensure(tree.atom_vertex_count() == 5 && tree.rule_vertex_count() == 6, || {
        format!("{} atom / {} rule vertices", tree.atom_vertex_count(), tree.rule_vertex_count())
    })?;
    ensure(tree.label(0) == &Label::Atom(Atom::prop("a")), || "root is not a".into())?;
    ensure(tree.children(0).len() == 2, || "root does not have two rule children".into())?;
    check_and_or_tree(tree, &p, &x, &Atom::prop("a"))?;
    ensure(time < STRUCTURE_BUDGET, || format!("took {time:?}"))?;
    Ok(format!("11 vertices (5 atom, 6 rule), {time:?}"))
}

fn criterion_2() -> Outcome {
    let (p, x) = load("basic.lp", "basic.as");
    let idx = GroundIndex::new(&p);
    let (e, time) = best_of(|| tree_of(&idx, &x, "a").shortest());
    ensure(e.size() == 2, || format!("size {}", e.size()))?;
    let labels: BTreeSet<String> = texts(&e).into_iter().collect();
    ensure(labels == BTreeSet::from(["a :- d.".to_string(), "d.".to_string()]), || format!("{labels:?}"))?;
    ensure(time < STRUCTURE_BUDGET, || format!("took {time:?}"))?;
    Ok(format!("size 2 {{a :- d., d.}}, {time:?}"))
}

fn criterion_3() -> Outcome {
    let (p, x) = load("cardinality.lp", "cardinality.as");
    let t = tree_of(&GroundIndex::new(&p), &x, "a");
    let rules: BTreeSet<String> =
        t.tree().vertex_ids().filter_map(|v| t.tree().label(v).as_rule()).map(|r| r.canonical()).collect();
    for want in ["a :- b, c, not e.", "a :- d, 1 {b; c} 2."] {
        ensure(rules.contains(want), || format!("missing {want}"))?;
    }
    ensure(!rules.contains("a :- d, not b."), || "contains a :- d, not b.".into())?;
    let e = t.shortest();
    ensure(e.size() == 2 && e.root_rule().canonical() == "a :- d, 1 {b; c} 2.", || format!("{:?}", texts(&e)))?;
    Ok("cardinality rule kept, blocked rule excluded, shortest size 2".into())
}

/// The largest Δ_D against `seen` over every explanation of `t`.
fn best_distance(all: &[Explanation], seen: &RuleVertexSet) -> usize {
    all.iter().map(|e| distance(seen, e).unwrap()).max().unwrap_or(0)
}

fn criterion_4() -> Outcome {
    let (p, x) = load("basic.lp", "basic.as");
    let t = tree_of(&GroundIndex::new(&p), &x, "a");
    let all = enumerate_explanations(&t, DEFAULT_ENUMERATION_CAP).unwrap();
    let two = t.k_different(2);
    let sizes: Vec<usize> = two.iter().map(Explanation::size).collect();
    ensure(sizes == [4, 2], || format!("sizes {sizes:?}"))?;
    let mut seen = RuleVertexSet::new(t.id());
    let mut deltas = Vec::new();
    for e in &two {
        let d = distance(&seen, e).unwrap();
        ensure(d == best_distance(&all, &seen), || format!("Δ_D {d} is not maximal"))?;
        deltas.push(d);
        seen.extend_from(e).unwrap();
    }
    ensure(deltas == [4, 2], || format!("Δ_D {deltas:?}"))?;
    let five = t.k_different(5);
    ensure(five.len() == 2, || format!("k=5 returned {}", five.len()))?;
    Ok("sizes [4, 2], Δ_D [4, 2], k=5 stops at 2".into())
}

fn criterion_5() -> Outcome {
    let (p, x) = load("basic.lp", "basic.as");
    let t = tree_of(&GroundIndex::new(&p), &x, "a");
    let longest = enumerate_explanations(&t, DEFAULT_ENUMERATION_CAP).unwrap().iter().map(Explanation::size).max();
    let one = t.k_different(1);
    ensure(one.len() == 1 && Some(one[0].size()) == longest && one[0].size() == 4, || {
        format!("got {:?}, longest {longest:?}", one.iter().map(Explanation::size).collect::<Vec<_>>())
    })?;
    Ok("k=1 gives the longest explanation, size 4".into())
}

fn criterion_6() -> Outcome {
    let (p, x) = load("genes.lp", "genes.as");
    let (table, _) = parse_lookup(&fixture("genes.lookup")).unwrap();
    let query = r#"what_be_genes("CASK")"#;
    let least = common::least_model(&ground_program(&p).unwrap());
    ensure(least == x, || "genes.as is not the least model of the program".into())?;
    let ((t, e, text), time) = best_of(|| {
        let source = OnDemand::new(&p, &x).unwrap();
        let t = tree_of(&source, &x, query);
        let e = t.shortest();
        let text = render_nl(&e, &table);
        (t, e, text)
    });
    let heads: Vec<String> = e.vertices().iter().map(|v| v.rule.head.as_ref().unwrap().to_string()).collect();
    let want = [
        r#"what_be_genes("CASK")"#,
        r#"gene_reachable_from("CASK",2)"#,
        r#"gene_gene("CASK","DLG4")"#,
        r#"gene_gene_biogrid("CASK","DLG4")"#,
        r#"gene_reachable_from("DLG4",1)"#,
        r#"gene_gene("DLG4","ADRB1")"#,
        r#"gene_gene_biogrid("DLG4","ADRB1")"#,
        r#"start_gene("ADRB1")"#,
    ];
    ensure(heads == want, || format!("shortest explanation heads {heads:?}"))?;
    let all = enumerate_explanations(&t, DEFAULT_ENUMERATION_CAP).unwrap();
    let via_dlg1 = all.iter().any(|s| {
        s.size() > e.size()
            && s.vertices().iter().any(|v| v.rule.canonical().starts_with(r#"gene_gene("CASK","DLG1")"#))
    });
    ensure(via_dlg1, || "no larger explanation through DLG1".into())?;
    ensure(all.iter().map(Explanation::size).min() == Some(e.size()), || "shortest is not minimal".into())?;
    let expected = fixture("genes_shortest.txt");
    ensure(text == expected, || format!("nl text differs:\n{text}"))?;
    ensure(time < Q8_BUDGET, || format!("took {time:?}"))?;
    Ok(format!("8 rule vertices, DLG1 chain present, text matches, {time:?}"))
}

fn criterion_7() -> Outcome {
    let set = |s: &str| parse_answer_set(s).unwrap();
    let p1 = parse_program(&fixture("wf_undecided.lp")).unwrap();
    let wf1 = well_founded_model(&p1).unwrap();
    ensure(wf1 == PartialInterpretation { pos: set("b c"), neg: set("") }, || format!("{wf1:?}"))?;
    let (p2, x2) = load("wf_assumption.lp", "wf_assumption.as");
    let wf2 = well_founded_model(&p2).unwrap();
    ensure(wf2 == PartialInterpretation { pos: set("a b"), neg: set("") }, || format!("{wf2:?}"))?;
    let ta = tentative_assumptions(&p2, &x2).unwrap();
    ensure(ta == set("d"), || format!("TA {ta:?}"))?;
    let us = assumptions(&p2, &x2).unwrap();
    ensure(us.contains(&set("d")), || format!("assumptions {us:?}"))?;
    Ok("<{b,c},{}> and <{a,b},{}>, TA = {d}, {d} is an assumption".into())
}

fn criterion_8() -> Outcome {
    let (p, x) = load("basic.lp", "basic.as");
    let (g, root) = parse_egraph_json(&fixture("basic_egraph.json")).unwrap();
    ensure(root == Some(ENode::Pos(Atom::prop("a"))), || "basic_egraph root".into())?;
    let t = justification_to_explanation(&p, &x, &Atom::prop("a"), &g).map_err(|e| e.to_string())?;
    let rule = |s: &str| Label::Rule(Arc::new(parse_rule(s).unwrap()));
    let atom = |s: &str| Label::Atom(Atom::prop(s));
    let mut want = VertexLabeledTree::with_root(atom("a"));
    let r = want.add_child(0, rule("a :- b, c."));
    let b = want.add_child(r, atom("b"));
    let c = want.add_child(r, atom("c"));
    let rb = want.add_child(b, rule("b :- c."));
    want.add_child(c, rule("c."));
    let c2 = want.add_child(rb, atom("c"));
    want.add_child(c2, rule("c."));
    ensure(t.is_label_isomorphic(&want), || "jst2exp output differs from the expected tree".into())?;
    ensure(tree_of(&GroundIndex::new(&p), &x, "a").admits(&t), || "not an explanation tree of the and-or tree".into())?;

    let (pn, xn) = load("negation.lp", "negation.as");
    let tn = parse_tree_json(&fixture("negation_tree.json")).unwrap();
    let gn = explanation_to_justification(&xn, &tn).map_err(|e| e.to_string())?;
    let mut want_n = EGraph::new();
    let pos = |s: &str| ENode::Pos(Atom::prop(s));
    want_n.add_edge(pos("a"), pos("b"), Sign::Plus);
    want_n.add_edge(pos("a"), pos("c"), Sign::Plus);
    want_n.add_edge(pos("b"), ENode::Top, Sign::Plus);
    want_n.add_edge(pos("c"), ENode::Top, Sign::Plus);
    ensure(gn == want_n, || format!("exp2jst output {gn:?}"))?;
    check_offline_justification(&reduct(&pn, &xn).unwrap(), &gn, &pos("a"), &xn, &AtomSet::new())?;
    Ok("both conversions exact, exp2jst output is an offline justification of the reduct".into())
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checked_atoms = 0usize;
    for case in 0..RANDOM_PROGRAMS {
        let (p, sets) = common::program_with_answer_sets(&mut rng);
        let idx = GroundIndex::new(&p);
        for x in &sets {
            for a in x {
                let ctx = || format!("case {case}: program {p} answer set {x:?} atom {a}");
                // (a)
                let t = AndOrTree::build(&idx, x, a).unwrap().ok_or_else(|| format!("(a) empty tree, {}", ctx()))?;
                // (d)
                check_and_or_tree(t.tree(), &p, x, a).map_err(|m| format!("(d) {m}, {}", ctx()))?;
                let all = enumerate_explanations(&t, DEFAULT_ENUMERATION_CAP).map_err(|e| format!("{e}, {}", ctx()))?;
                // (b)
                let min = all.iter().map(Explanation::size).min().unwrap();
                ensure(t.shortest().size() == min, || {
                    format!("(b) shortest {} != {min}, {}", t.shortest().size(), ctx())
                })?;
                // (c)
                let mut seen = RuleVertexSet::new(t.id());
                for (i, e) in t.k_different(3).iter().enumerate() {
                    let d = distance(&seen, e).unwrap();
                    let best = best_distance(&all, &seen);
                    ensure(d == best, || format!("(c) iterate {i}: Δ_D {d} < {best}, {}", ctx()))?;
                    seen.extend_from(e).unwrap();
                }
                checked_atoms += 1;
            }
        }
    }
    // (e)
    let mut compared = 0usize;
    for case in 0..RANDOM_PROGRAMS {
        let (p, g, sets) = common::nonground_with_answer_sets(&mut rng);
        let eager = GroundIndex::new(&g);
        for x in &sets {
            let lazy = OnDemand::new(&p, x).unwrap();
            for a in x {
                let te = tree_of(&eager, x, &a.to_string());
                let tl = tree_of(&lazy, x, &a.to_string());
                let same = te.tree().canonical_form() == tl.tree().canonical_form()
                    && texts(&te.shortest()) == texts(&tl.shortest())
                    && te.k_different(3).iter().map(texts).eq(tl.k_different(3).iter().map(texts));
                ensure(same, || format!("(e) case {case}: eager and on-demand differ for {a} in {x:?}\n{p}"))?;
                compared += 1;
            }
        }
    }
    let time = start.elapsed();
    ensure(time < PROPERTY_BUDGET, || format!("took {time:?}"))?;
    Ok(format!(
        "{RANDOM_PROGRAMS} ground programs ({checked_atoms} atoms), {RANDOM_PROGRAMS} non-ground programs ({compared} atoms), {time:?}"
    ))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 10);
    let mut cases = 0usize;
    let mut programs = 0usize;
    while cases < ROUND_TRIP_CASES {
        programs += 1;
        if programs > 20 * ROUND_TRIP_CASES {
            return Err(format!("only {cases} trees with unique labels were generated"));
        }
        let (p, sets) = common::program_with_answer_sets(&mut rng);
        let idx = GroundIndex::new(&p);
        for x in &sets {
            let red = reduct(&p, x).unwrap();
            for a in x {
                let t = tree_of(&idx, x, &a.to_string());
                for e in enumerate_explanations(&t, DEFAULT_ENUMERATION_CAP).unwrap() {
                    let tree = e.to_explanation_tree(&t).unwrap();
                    if !tree.has_unique_labels() {
                        continue;
                    }
                    let g = explanation_to_justification(x, &tree).map_err(|e| e.to_string())?;
                    check_offline_justification(&red, &g, &ENode::Pos(a.clone()), x, &AtomSet::new())
                        .map_err(|m| format!("{m}\n{p}"))?;
                    let back = justification_to_explanation(&red, x, a, &g).map_err(|e| e.to_string())?;
                    let reduced = tree.map_labels(|l| match l {
                        Label::Rule(r) => Label::Rule(Arc::new(r.reduct(x).expect("applicable rule"))),
                        other => other.clone(),
                    });
                    ensure(back.is_label_isomorphic(&reduced), || format!("round trip differs for {a}\n{p}"))?;
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} trees from {programs} programs"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("and-or tree of the basic example", criterion_1),
        ("shortest explanation of the basic example", criterion_2),
        ("negation and cardinality", criterion_3),
        ("k different explanations", criterion_4),
        ("longest explanation for k = 1", criterion_5),
        ("gene chain fixture", criterion_6),
        ("well-founded model and assumptions", criterion_7),
        ("justification conversions", criterion_8),
        ("random property suite", criterion_9),
        ("conversion round trip", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(run) {
            Ok(Ok(detail)) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
            Err(_) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: panicked", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
