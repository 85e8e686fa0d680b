//! Natural-language rendering of explanations.
//!
//! Each rule vertex is verbalized through the template of its head
//! predicate, in pre-order. A line is indented two spaces per verbalized
//! ancestor, so a statement sits below the statements it helps explain.
//! Rules without a template fall back to their source text; rules whose
//! template is empty are not verbalized and their children move up a level.

use crate::explain::Explanation;
use crate::io::LookupTable;
use crate::program::Rule;

/// The sentence for one rule, or `None` when its predicate is silent.
pub fn verbalize(rule: &Rule, table: &LookupTable) -> Option<String> {
    let Some(head) = &rule.head else { return Some(rule.source.clone()) };
    match table.get(&head.predicate, head.arity()) {
        Some(t) if t.is_silent() => None,
        Some(t) => {
            let args: Vec<String> = head.args.iter().map(|a| a.plain_text()).collect();
            Some(t.apply(&args))
        }
        None => Some(rule.source.clone()),
    }
}

pub fn render_nl(e: &Explanation, table: &LookupTable) -> String {
    let vs = e.vertices();
    // Indentation level of each vertex's own line, and of its children.
    let mut own = vec![0usize; vs.len()];
    let mut below = vec![0usize; vs.len()];
    let mut out = String::new();
    for (i, v) in vs.iter().enumerate() {
        own[i] = v.parent.map_or(0, |p| below[p]);
        match verbalize(&v.rule, table) {
            Some(line) => {
                for _ in 0..own[i] {
                    out.push_str("  ");
                }
                out.push_str(&line);
                out.push('\n');
                below[i] = own[i] + 1;
            }
            None => below[i] = own[i],
        }
    }
    out
}

/// The rules of `e` in pre-order, indented two spaces per level.
pub fn render_rules(e: &Explanation) -> String {
    let mut out = String::new();
    for v in e.vertices() {
        for _ in 0..v.depth {
            out.push_str("  ");
        }
        out.push_str(&v.rule.source);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explain::AndOrTree;
    use crate::grounder::GroundIndex;
    use crate::io::{parse_answer_set, parse_lookup, parse_program};
    use crate::program::Atom;

    fn explain(program: &str, x: &str, p: &str) -> Explanation {
        let idx = GroundIndex::new(&parse_program(program).unwrap());
        AndOrTree::build(&idx, &parse_answer_set(x).unwrap(), &Atom::prop(p)).unwrap().unwrap().shortest()
    }

    #[test]
    fn empty_table_prints_rules() {
        let e = explain("a :- b. b.", "a b", "a");
        assert_eq!(render_nl(&e, &LookupTable::new()), "a :- b.\n  b.\n");
    }

    #[test]
    fn rule_listing() {
        let e = explain("a :- b, c. b. c.", "a b c", "a");
        assert_eq!(render_rules(&e), "a :- b, c.\n  b.\n  c.\n");
    }

    #[test]
    fn templates_and_silence() {
        let e = explain("a :- m. m :- b. b.", "a b m", "a");
        let (t, _) = parse_lookup("a/0: A holds.\nm/0:\nb/0: B holds.").unwrap();
        assert_eq!(render_nl(&e, &t), "A holds.\n  B holds.\n");
    }

    #[test]
    fn string_arguments_lose_quotes() {
        let e = crate::io::parse_rule(r#"gene_gene_biogrid("DLG4","ADRB1")."#).unwrap();
        let (t, _) =
            parse_lookup("gene_gene_biogrid/2: The gene $1 interacts with the gene $2 according to BioGRID.").unwrap();
        assert_eq!(verbalize(&e, &t).unwrap(), "The gene DLG4 interacts with the gene ADRB1 according to BioGRID.");
    }
}
