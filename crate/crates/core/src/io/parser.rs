//! Text format for programs and answer sets.
//!
//! ```text
//! rule    := head "." | head ":-" body "." | ":-" body "."
//! body    := element ("," element)*
//! element := atom | "not" atom | [int] "{" atom (";" atom)* "}" [int]
//! atom    := ident | ident "(" term ("," term)* ")"
//! term    := ident | int | "string" | Variable | int ".." int   (intervals in facts only)
//! ```
//!
//! `%` starts a comment that runs to the end of the line.

use std::fmt;

use thiserror::Error;

use crate::program::{Atom, AtomSet, CardinalityExpression, Program, Rule, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Var(String),
    Int(String),
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Dot,
    DotDot,
    If,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Var(s) | Tok::Int(s) => write!(f, "`{s}`"),
            Tok::Str(_) => f.write_str("string"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::DotDot => f.write_str("`..`"),
            Tok::If => f.write_str("`:-`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    start: usize,
    end: usize,
}

struct Lexer<'s> {
    src: &'s str,
    pos: usize,
}

fn position(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn error_at(src: &str, offset: usize, message: impl Into<String>) -> ParseError {
    let (line, column) = position(src, offset);
    ParseError { line, column, message: message.into() }
}

impl<'s> Lexer<'s> {
    fn new(src: &'s str) -> Self {
        Lexer { src, pos: 0 }
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else if c == '%' {
                match self.src[self.pos..].find('\n') {
                    Some(n) => self.pos += n + 1,
                    None => self.pos = self.src.len(),
                }
            } else {
                break;
            }
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'s str {
        let start = self.pos;
        while let Some(c) = self.peek_char() {
            if !pred(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn tokenize(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            let start = self.pos;
            let Some(c) = self.peek_char() else {
                out.push(Spanned { tok: Tok::Eof, start, end: start });
                return Ok(out);
            };
            let ident_char = |c: char| c.is_ascii_alphanumeric() || c == '_';
            let tok = match c {
                'a'..='z' => Tok::Ident(self.take_while(ident_char).to_string()),
                'A'..='Z' => Tok::Var(self.take_while(ident_char).to_string()),
                '0'..='9' => Tok::Int(self.take_while(|c| c.is_ascii_digit()).to_string()),
                '"' => Tok::Str(self.string()?),
                _ => {
                    let rest = &self.src[self.pos..];
                    let (tok, len) = if rest.starts_with(":-") {
                        (Tok::If, 2)
                    } else if rest.starts_with("..") {
                        (Tok::DotDot, 2)
                    } else {
                        let t = match c {
                            '(' => Tok::LParen,
                            ')' => Tok::RParen,
                            '{' => Tok::LBrace,
                            '}' => Tok::RBrace,
                            ',' => Tok::Comma,
                            ';' => Tok::Semi,
                            '.' => Tok::Dot,
                            _ => return Err(error_at(self.src, start, format!("unexpected character `{c}`"))),
                        };
                        (t, 1)
                    };
                    self.pos += len;
                    tok
                }
            };
            out.push(Spanned { tok, start, end: self.pos });
        }
    }

    fn string(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        self.pos += 1;
        let mut value = String::new();
        loop {
            let Some(c) = self.peek_char() else {
                return Err(error_at(self.src, start, "unterminated string"));
            };
            self.pos += c.len_utf8();
            match c {
                '"' => return Ok(value),
                '\\' => {
                    let Some(e) = self.peek_char() else {
                        return Err(error_at(self.src, start, "unterminated string"));
                    };
                    self.pos += e.len_utf8();
                    match e {
                        '"' => value.push('"'),
                        '\\' => value.push('\\'),
                        'n' => value.push('\n'),
                        other => {
                            return Err(error_at(
                                self.src,
                                self.pos - other.len_utf8() - 1,
                                format!("unknown escape `\\{other}`"),
                            ))
                        }
                    }
                }
                c => value.push(c),
            }
        }
    }
}

/// An argument as written: a plain term, or an interval awaiting expansion.
enum RawTerm {
    Term(Term),
    Interval(i64, i64),
}

struct RawAtom {
    predicate: String,
    args: Vec<RawTerm>,
    start: usize,
}

struct Parser<'s> {
    src: &'s str,
    toks: Vec<Spanned>,
    at: usize,
}

impl<'s> Parser<'s> {
    fn new(src: &'s str) -> Result<Self, ParseError> {
        Ok(Parser { src, toks: Lexer::new(src).tokenize()?, at: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.at + n).min(self.toks.len() - 1)].tok
    }

    fn offset(&self) -> usize {
        self.toks[self.at].start
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        error_at(self.src, self.offset(), message)
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        self.error(format!("expected {expected}, found {}", self.peek()))
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<Spanned, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn integer(&self, text: &str, start: usize) -> Result<i64, ParseError> {
        text.parse().map_err(|_| error_at(self.src, start, format!("integer `{text}` out of range")))
    }

    fn term(&mut self) -> Result<RawTerm, ParseError> {
        let t = self.bump();
        Ok(match t.tok {
            Tok::Ident(s) => RawTerm::Term(Term::Symbol(s)),
            Tok::Var(s) => RawTerm::Term(Term::Variable(s)),
            Tok::Str(s) => RawTerm::Term(Term::Str(s)),
            Tok::Int(s) => {
                let lo = self.integer(&s, t.start)?;
                if *self.peek() == Tok::DotDot {
                    self.bump();
                    let hi_tok = self.bump();
                    let Tok::Int(h) = hi_tok.tok else {
                        return Err(error_at(self.src, hi_tok.start, "expected integer after `..`"));
                    };
                    RawTerm::Interval(lo, self.integer(&h, hi_tok.start)?)
                } else {
                    RawTerm::Term(Term::Integer(lo))
                }
            }
            other => {
                return Err(error_at(self.src, t.start, format!("expected term, found {other}")));
            }
        })
    }

    fn raw_atom(&mut self) -> Result<RawAtom, ParseError> {
        let start = self.offset();
        let predicate = match self.peek().clone() {
            Tok::Ident(name) if name != "not" => {
                self.bump();
                name
            }
            _ => return Err(self.unexpected("atom")),
        };
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            loop {
                args.push(self.term()?);
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RParen => {
                        self.bump();
                        break;
                    }
                    _ => return Err(self.unexpected("`,` or `)`")),
                }
            }
        }
        Ok(RawAtom { predicate, args, start })
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let raw = self.raw_atom()?;
        plain_atom(self.src, raw)
    }

    fn bound(&mut self) -> Result<u32, ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Int(s) => s.parse().map_err(|_| error_at(self.src, t.start, "bound must be a non-negative integer")),
            _ => Err(error_at(self.src, t.start, "bound must be a non-negative integer")),
        }
    }

    fn cardinality(&mut self) -> Result<CardinalityExpression, ParseError> {
        let start = self.offset();
        let lower = if matches!(self.peek(), Tok::Int(_)) { self.bound()? } else { 0 };
        self.expect(Tok::LBrace, "`{`")?;
        let mut atoms = Vec::new();
        if *self.peek() != Tok::RBrace {
            loop {
                atoms.push(self.atom()?);
                match self.peek() {
                    Tok::Semi => {
                        self.bump();
                    }
                    Tok::RBrace => break,
                    _ => return Err(self.unexpected("`;` or `}`")),
                }
            }
        }
        self.expect(Tok::RBrace, "`}`")?;
        let upper = if matches!(self.peek(), Tok::Int(_)) { Some(self.bound()?) } else { None };
        CardinalityExpression::new(lower, upper, atoms).map_err(|e| error_at(self.src, start, e.to_string()))
    }

    fn statement(&mut self) -> Result<Vec<Rule>, ParseError> {
        let start = self.offset();
        let head = match self.peek() {
            Tok::If => None,
            Tok::LBrace | Tok::Int(_) => return Err(self.error("choice expressions in rule heads are not supported")),
            _ => Some(self.raw_atom()?),
        };
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut card = Vec::new();
        let has_body = *self.peek() == Tok::If;
        if has_body {
            self.bump();
            loop {
                match (self.peek(), self.peek_at(1)) {
                    (Tok::Ident(n), Tok::Ident(_)) if n == "not" => {
                        self.bump();
                        neg.push(self.atom()?);
                    }
                    (Tok::Int(_), _) | (Tok::LBrace, _) => card.push(self.cardinality()?),
                    _ => pos.push(self.atom()?),
                }
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::Dot => break,
                    _ => return Err(self.unexpected("`,` or `.`")),
                }
            }
        }
        let end = self.expect(Tok::Dot, if has_body { "`.`" } else { "`:-` or `.`" })?.end;
        let source = self.src[start..end].trim().to_string();

        let Some(head) = head else {
            return Ok(vec![Rule::new(None, pos, neg, card).with_source(source)]);
        };
        let has_interval = head.args.iter().any(|t| matches!(t, RawTerm::Interval(..)));
        if !has_interval {
            let head = plain_atom(self.src, head)?;
            return Ok(vec![Rule::new(Some(head), pos, neg, card).with_source(source)]);
        }
        if has_body {
            return Err(error_at(self.src, head.start, "intervals are only supported in facts"));
        }
        Ok(expand_intervals(&head).into_iter().map(Rule::fact).collect())
    }
}

fn plain_atom(src: &str, raw: RawAtom) -> Result<Atom, ParseError> {
    let mut args = Vec::with_capacity(raw.args.len());
    for a in raw.args {
        match a {
            RawTerm::Term(t) => args.push(t),
            RawTerm::Interval(..) => return Err(error_at(src, raw.start, "intervals are only supported in facts")),
        }
    }
    Ok(Atom::new(raw.predicate, args))
}

fn expand_intervals(raw: &RawAtom) -> Vec<Atom> {
    let mut out: Vec<Vec<Term>> = vec![Vec::new()];
    for arg in &raw.args {
        let choices: Vec<Term> = match arg {
            RawTerm::Term(t) => vec![t.clone()],
            RawTerm::Interval(lo, hi) => (*lo..=*hi).map(Term::Integer).collect(),
        };
        out = out
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |c| {
                    let mut p = prefix.clone();
                    p.push(c.clone());
                    p
                })
            })
            .collect();
    }
    out.into_iter().map(|args| Atom::new(raw.predicate.clone(), args)).collect()
}

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(text)?;
    let mut rules = Vec::new();
    while *p.peek() != Tok::Eof {
        rules.extend(p.statement()?);
    }
    Ok(Program::new(rules))
}

/// A single atom, possibly non-ground.
pub fn parse_atom(text: &str) -> Result<Atom, ParseError> {
    let mut p = Parser::new(text)?;
    let atom = p.atom()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    Ok(atom)
}

/// A single ground atom.
pub fn parse_ground_atom(text: &str) -> Result<Atom, ParseError> {
    let atom = parse_atom(text)?;
    if !atom.is_ground() {
        return Err(error_at(text, 0, format!("non-ground atom `{atom}`")));
    }
    Ok(atom)
}

/// A single rule, as rendered by [`Rule`]'s `Display`.
pub fn parse_rule(text: &str) -> Result<Rule, ParseError> {
    let mut rules = parse_program(text)?.rules;
    if rules.len() != 1 {
        return Err(error_at(text, 0, format!("expected exactly one rule, found {}", rules.len())));
    }
    Ok(rules.remove(0))
}

/// Whitespace-separated ground atoms; `Answer: N` header lines are skipped.
pub fn parse_answer_set(text: &str) -> Result<AtomSet, ParseError> {
    let mut body = String::with_capacity(text.len());
    for line in text.lines() {
        if line.trim_start().starts_with("Answer:") {
            body.push_str(&" ".repeat(line.len()));
        } else {
            body.push_str(line);
        }
        body.push('\n');
    }
    let mut p = Parser::new(&body)?;
    let mut atoms = AtomSet::new();
    while *p.peek() != Tok::Eof {
        let start = p.offset();
        let atom = p.atom()?;
        if !atom.is_ground() {
            return Err(error_at(&body, start, format!("non-ground atom `{atom}`")));
        }
        atoms.insert(atom);
    }
    Ok(atoms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_program() {
        let p = parse_program("a :- b, c.  a :- d.  d.  b :- c.  c.").unwrap();
        assert_eq!(p.rules.len(), 5);
        assert_eq!(p.rules[0].pos, vec![Atom::prop("b"), Atom::prop("c")]);
        assert_eq!(p.rules[0].source, "a :- b, c.");
        assert!(p.rules[2].is_fact());
    }

    #[test]
    fn single_fact() {
        let p = parse_program("p.").unwrap();
        assert_eq!(p.rules, vec![Rule::fact(Atom::prop("p"))]);
    }

    #[test]
    fn cardinality_in_body() {
        let p = parse_program("a :- d, 1 {b; c} 2.").unwrap();
        let r = &p.rules[0];
        assert_eq!(r.pos, vec![Atom::prop("d")]);
        assert_eq!(r.card.len(), 1);
        assert_eq!(r.card[0].lower, 1);
        assert_eq!(r.card[0].upper, Some(2));
        assert_eq!(r.card[0].atoms, vec![Atom::prop("b"), Atom::prop("c")]);
    }

    #[test]
    fn optional_bounds() {
        let p = parse_program("a :- {b}. c :- 2 {b; d}. e :- {b} 0.").unwrap();
        assert_eq!((p.rules[0].card[0].lower, p.rules[0].card[0].upper), (0, None));
        assert_eq!((p.rules[1].card[0].lower, p.rules[1].card[0].upper), (2, None));
        assert_eq!((p.rules[2].card[0].lower, p.rules[2].card[0].upper), (0, Some(0)));
    }

    #[test]
    fn negation_constraints_and_comments() {
        let p = parse_program("% header\na :- b, not c. % trailing\n:- a, not b.\n").unwrap();
        assert_eq!(p.rules[0].neg, vec![Atom::prop("c")]);
        assert!(p.rules[1].is_constraint());
        assert_eq!(p.rules[1].neg, vec![Atom::prop("b")]);
    }

    #[test]
    fn terms() {
        let a = parse_atom("p(x, 42, \"ADRB1\", Y)").unwrap();
        assert_eq!(a.args, vec![Term::symbol("x"), Term::Integer(42), Term::string("ADRB1"), Term::variable("Y")]);
    }

    #[test]
    fn intervals_desugar_in_facts() {
        let p = parse_program("index(1..3).").unwrap();
        let heads: Vec<String> = p.rules.iter().map(|r| r.head.as_ref().unwrap().to_string()).collect();
        assert_eq!(heads, vec!["index(1)", "index(2)", "index(3)"]);
        assert!(parse_program("p(1..2) :- q.").is_err());
        assert!(parse_program("p :- q(1..2).").is_err());
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_program("a :- b\nc.").unwrap_err();
        assert_eq!((e.line, e.column), (2, 1));
        let e = parse_program("p(a.").unwrap_err();
        assert!(e.message.contains("`)`"), "{}", e.message);
        let e = parse_program("p(\"abc).").unwrap_err();
        assert_eq!(e.message, "unterminated string");
        let e = parse_program("a :- 99999999999 {b}.").unwrap_err();
        assert_eq!(e.message, "bound must be a non-negative integer");
        let e = parse_program("a :- 3 {b} 1.").unwrap_err();
        assert!(e.message.contains("out of order"));
        let e = parse_program("{a; b}.").unwrap_err();
        assert!(e.message.contains("choice"));
        assert!(parse_program("a :- b").is_err());
        assert!(parse_program("a :- .").is_err());
        assert!(parse_program("a # b.").is_err());
    }

    #[test]
    fn answer_sets() {
        let x = parse_answer_set("a b c d").unwrap();
        assert_eq!(x.len(), 4);
        assert!(parse_answer_set("").unwrap().is_empty());
        let x = parse_answer_set("drug_gene(\"Epinephrine\",\"ADRB1\")").unwrap();
        let a = x.iter().next().unwrap();
        assert_eq!(a.args, vec![Term::string("Epinephrine"), Term::string("ADRB1")]);
        let x = parse_answer_set("Answer: 1\np q(1)\n").unwrap();
        assert_eq!(x.len(), 2);
        assert!(parse_answer_set("p(X)").is_err());
    }

    #[test]
    fn rule_round_trip() {
        for text in ["a :- d, not b, 1 {b; c} 2.", "d.", ":- x, not y.", "p(\"a b\",1) :- {q(1)} 3."] {
            let r = parse_rule(text).unwrap();
            assert_eq!(r.canonical(), text);
            assert_eq!(parse_rule(&r.canonical()).unwrap(), r);
        }
    }
}
