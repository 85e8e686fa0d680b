use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context as _, Result};
use clap::{Parser, Subcommand, ValueEnum};

use aspexplain::explain::{AndOrTree, ExplainError, Explanation, DEFAULT_ENUMERATION_CAP};
use aspexplain::grounder::{ground_program, GroundIndex, OnDemand};
use aspexplain::io::dot::{egraph_to_dot, explanation_to_dot, tree_to_dot};
use aspexplain::io::json::{explanations_to_json, Document, Kind};
use aspexplain::io::{parse_answer_set, parse_ground_atom, parse_lookup, parse_program, LookupTable};
use aspexplain::nl::{render_nl, render_rules};
use aspexplain::program::{check_answer_set, reduct, Atom, AtomSet, Program, Verdict, DEFAULT_VERIFY_CAP};
use aspexplain::wf::{check_offline_justification, explanation_to_justification, justification_to_explanation, ENode};

/// Explain why an atom belongs to an answer set of a logic program.
#[derive(Debug, Parser)]
#[command(name = "aspexplain", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a shortest explanation, or k mutually different ones.
    Explain {
        program: PathBuf,
        answer_set: PathBuf,
        atom: String,
        #[arg(long, value_enum, default_value_t = Mode::Shortest)]
        mode: Mode,
        /// Number of explanations in kdiff mode.
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Predicate look-up table for the nl format.
        #[arg(long)]
        lookup: Option<PathBuf>,
        /// Check that the answer set really is one before explaining.
        #[arg(long)]
        verify: bool,
        #[arg(long, value_enum, default_value_t = Ground::Ondemand)]
        ground: Ground,
    },
    /// Check whether a set of atoms is an answer set.
    Verify { program: PathBuf, answer_set: PathBuf },
    /// Convert between offline justifications and explanation trees.
    Convert {
        #[arg(value_enum)]
        direction: Direction,
        program: PathBuf,
        answer_set: PathBuf,
        /// JSON e-graph (jst2exp) or explanation tree (exp2jst).
        input: PathBuf,
        /// Atom to explain; defaults to the root of the input document.
        #[arg(long)]
        atom: Option<String>,
        #[arg(long, value_enum, default_value_t = GraphFormat::Json)]
        format: GraphFormat,
    },
    /// Print every explanation of an atom with its size.
    Enumerate {
        program: PathBuf,
        answer_set: PathBuf,
        atom: String,
        /// Refuse when there are more explanations than this.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        max_expl: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        lookup: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Ground::Ondemand)]
        ground: Ground,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Shortest,
    Kdiff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Nl,
    Dot,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GraphFormat {
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Ground {
    Eager,
    Ondemand,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Direction {
    Jst2exp,
    Exp2jst,
}

/// A failure that maps to exit code 1 rather than 2.
#[derive(Debug)]
struct Rejected(String);

impl fmt::Display for Rejected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Rejected {}

fn rejected(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(Rejected(msg.into()))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_program(path: &Path) -> Result<Program> {
    parse_program(&read(path)?).map_err(|e| anyhow!("{}:{e}", path.display()))
}

fn load_answer_set(path: &Path) -> Result<AtomSet> {
    parse_answer_set(&read(path)?).map_err(|e| anyhow!("{}:{e}", path.display()))
}

fn load_lookup(path: Option<&Path>) -> Result<LookupTable> {
    let Some(path) = path else { return Ok(LookupTable::new()) };
    let (table, warnings) = parse_lookup(&read(path)?).map_err(|e| anyhow!("{}:{e}", path.display()))?;
    for w in warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(table)
}

fn parse_query(text: &str) -> Result<Atom> {
    parse_ground_atom(text).map_err(|e| anyhow!("atom `{text}`: {e}"))
}

fn verify_cap() -> Result<usize> {
    match std::env::var("ASPEXPLAIN_MAX_BASE") {
        Ok(v) => v.trim().parse().with_context(|| format!("ASPEXPLAIN_MAX_BASE={v} is not a number")),
        Err(_) => Ok(DEFAULT_VERIFY_CAP),
    }
}

fn ground(program: &Program) -> Result<Program> {
    if program.is_ground() {
        return Ok(program.clone());
    }
    Ok(ground_program(program)?)
}

fn verify(program: &Program, x: &AtomSet) -> Result<()> {
    match check_answer_set(&ground(program)?, x, verify_cap()?)? {
        Verdict::AnswerSet => Ok(()),
        Verdict::UnsatisfiedRule(r) => {
            Err(rejected(format!("not an answer set: unsatisfied rule `{r}` in the reduct")))
        }
        Verdict::NotMinimal(smaller) => {
            let atoms: Vec<String> = smaller.iter().map(ToString::to_string).collect();
            Err(rejected(format!(
                "not an answer set: not subset-minimal / unfounded, {{{}}} is a smaller model of the reduct",
                atoms.join(", ")
            )))
        }
    }
}

fn build_tree(program: &Program, x: &AtomSet, p: &Atom, mode: Ground) -> Result<AndOrTree> {
    if !x.contains(p) {
        return Err(rejected(ExplainError::AtomNotInAnswerSet(p.clone()).to_string()));
    }
    let built = match mode {
        Ground::Eager => AndOrTree::build(&GroundIndex::new(&ground(program)?), x, p),
        Ground::Ondemand => AndOrTree::build(&OnDemand::new(program, x)?, x, p),
    }?;
    built.ok_or_else(|| {
        rejected(format!("{p} has no explanation: no well-supported derivation exists in the answer set"))
    })
}

fn render(explanations: &[Explanation], format: Format, table: &LookupTable, numbered: bool) -> String {
    match format {
        Format::Json if numbered || explanations.len() != 1 => explanations_to_json(explanations) + "\n",
        Format::Json => Document::from_explanation(&explanations[0]).to_json() + "\n",
        _ => {
            let mut out = String::new();
            for (i, e) in explanations.iter().enumerate() {
                if numbered {
                    if i > 0 {
                        out.push('\n');
                    }
                    let comment = if format == Format::Dot { "//" } else { "%" };
                    out.push_str(&format!("{comment} explanation {} (size {})\n", i + 1, e.size()));
                }
                out.push_str(&match format {
                    Format::Text => render_rules(e),
                    Format::Nl => render_nl(e, table),
                    Format::Dot => explanation_to_dot(e),
                    Format::Json => unreachable!(),
                });
            }
            out
        }
    }
}

fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Explain { program, answer_set, atom, mode, k, format, lookup, verify: check, ground: g } => {
            let p = load_program(&program)?;
            let x = load_answer_set(&answer_set)?;
            let q = parse_query(&atom)?;
            let table = load_lookup(lookup.as_deref())?;
            if check {
                verify(&p, &x)?;
            }
            let tree = build_tree(&p, &x, &q, g)?;
            log::info!("and-or tree of {q} has {} vertices", tree.len());
            Ok(match mode {
                Mode::Shortest => render(&[tree.shortest()], format, &table, false),
                Mode::Kdiff => {
                    if k == 0 {
                        anyhow::bail!("--k must be at least 1");
                    }
                    render(&tree.k_different(k), format, &table, true)
                }
            })
        }
        Command::Verify { program, answer_set } => {
            let p = load_program(&program)?;
            let x = load_answer_set(&answer_set)?;
            verify(&p, &x)?;
            Ok("answer set\n".into())
        }
        Command::Convert { direction, program, answer_set, input, atom, format } => {
            let p = ground(&load_program(&program)?)?;
            let x = load_answer_set(&answer_set)?;
            let doc = Document::parse(&read(&input)?).map_err(|e| anyhow!("{}: {e}", input.display()))?;
            let query = atom.as_deref().map(parse_query).transpose()?;
            match direction {
                Direction::Jst2exp => {
                    let (g, root) = doc.to_egraph().map_err(|e| anyhow!("{}: {e}", input.display()))?;
                    let target = match (query, root) {
                        (Some(q), _) => q,
                        (None, Some(ENode::Pos(a))) => a,
                        _ => anyhow::bail!("no atom given and the e-graph has no positive root node"),
                    };
                    let tree = justification_to_explanation(&p, &x, &target, &g)?;
                    Ok(match format {
                        GraphFormat::Json => Document::from_tree(&tree).to_json() + "\n",
                        GraphFormat::Dot => tree_to_dot(&tree),
                    })
                }
                Direction::Exp2jst => {
                    let tree = doc.to_tree().map_err(|e| anyhow!("{}: {e}", input.display()))?;
                    let tree = match doc.kind {
                        Kind::Explanation => tree.with_atom_vertices(),
                        _ => Some(tree),
                    }
                    .ok_or_else(|| anyhow!("{}: rule vertices must have heads", input.display()))?;
                    let g = explanation_to_justification(&x, &tree)?;
                    let root = tree.root().and_then(|r| tree.label(r).as_atom().cloned()).map(ENode::Pos);
                    if let (Some(r), Some(q)) = (&root, &query) {
                        if r != &ENode::Pos(q.clone()) {
                            anyhow::bail!("the explanation tree is rooted at {r}, not {q}+");
                        }
                    }
                    if let Some(r) = &root {
                        if let Err(why) = check_offline_justification(&reduct(&p, &x)?, &g, r, &x, &AtomSet::new()) {
                            log::warn!("result is not an offline justification of the reduct: {why}");
                        }
                    }
                    Ok(match format {
                        GraphFormat::Json => Document::from_egraph(&g, root.as_ref()).to_json() + "\n",
                        GraphFormat::Dot => egraph_to_dot(&g),
                    })
                }
            }
        }
        Command::Enumerate { program, answer_set, atom, max_expl, format, lookup, ground: g } => {
            let p = load_program(&program)?;
            let x = load_answer_set(&answer_set)?;
            let q = parse_query(&atom)?;
            let table = load_lookup(lookup.as_deref())?;
            let all = build_tree(&p, &x, &q, g)?.enumerate(max_expl)?;
            eprintln!("{} explanation(s)", all.len());
            Ok(render(&all, format, &table, true))
        }
    }
}

/// 1 when the input was understood but rejected, 2 for everything else.
fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<Rejected>().is_some() {
        1
    } else {
        2
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
