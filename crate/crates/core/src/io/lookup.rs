//! Predicate look-up tables mapping `predicate/arity` to a sentence template.
//!
//! One record per line: `predicate/arity: template`. Placeholders `$1`..`$n`
//! stand for the atom's arguments. A record with an empty template marks a
//! predicate that is not verbalized at all. Blank lines and lines starting
//! with `%` are ignored.

use std::collections::BTreeMap;

use super::parser::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Piece {
    Text(String),
    Arg(usize),
}

/// A parsed sentence template.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    source: String,
    pieces: Vec<Piece>,
}

impl Template {
    fn parse(text: &str, arity: usize) -> Result<Self, String> {
        let mut pieces = Vec::new();
        let mut literal = String::new();
        let mut chars = text.char_indices().peekable();
        while let Some((_, c)) = chars.next() {
            if c != '$' {
                literal.push(c);
                continue;
            }
            let mut digits = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                digits.push(d);
                chars.next();
            }
            if digits.is_empty() {
                literal.push('$');
                continue;
            }
            let index: usize = digits.parse().map_err(|_| format!("placeholder ${digits} is too large"))?;
            if index == 0 || index > arity {
                return Err(format!("placeholder ${index} exceeds arity {arity}"));
            }
            if !literal.is_empty() {
                pieces.push(Piece::Text(std::mem::take(&mut literal)));
            }
            pieces.push(Piece::Arg(index - 1));
        }
        if !literal.is_empty() {
            pieces.push(Piece::Text(literal));
        }
        Ok(Template { source: text.to_string(), pieces })
    }

    /// Whether this template suppresses its predicate.
    pub fn is_silent(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn as_str(&self) -> &str {
        &self.source
    }

    pub fn apply(&self, args: &[String]) -> String {
        self.pieces
            .iter()
            .map(|p| match p {
                Piece::Text(t) => t.as_str(),
                Piece::Arg(i) => args.get(*i).map_or("", String::as_str),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LookupTable {
    entries: BTreeMap<(String, usize), Template>,
}

impl LookupTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, predicate: &str, arity: usize, template: &str) -> Result<(), String> {
        let t = Template::parse(template, arity)?;
        self.entries.insert((predicate.to_string(), arity), t);
        Ok(())
    }

    pub fn get(&self, predicate: &str, arity: usize) -> Option<&Template> {
        self.entries.get(&(predicate.to_string(), arity))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Parses a table; duplicate keys keep the last record and produce a warning.
pub fn parse_lookup(text: &str) -> Result<(LookupTable, Vec<String>), ParseError> {
    let mut table = LookupTable::new();
    let mut warnings = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let err = |column: usize, message: String| ParseError { line: n + 1, column, message };
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let indent = line.len() - line.trim_start().len() + 1;
        let Some((key, template)) = trimmed.split_once(':') else {
            return Err(err(indent, "expected `predicate/arity: template`".into()));
        };
        let Some((predicate, arity)) = key.trim().rsplit_once('/') else {
            return Err(err(indent, format!("expected `predicate/arity`, found `{}`", key.trim())));
        };
        let arity: usize = arity
            .trim()
            .parse()
            .map_err(|_| err(indent, format!("arity `{}` is not a non-negative integer", arity.trim())))?;
        let predicate = predicate.trim();
        let valid_name = predicate.starts_with(|c: char| c.is_ascii_lowercase())
            && predicate.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid_name {
            return Err(err(indent, format!("invalid predicate name `{predicate}`")));
        }
        if table.get(predicate, arity).is_some() {
            let w = format!("line {}: duplicate entry for {predicate}/{arity}; the last one wins", n + 1);
            log::warn!("{w}");
            warnings.push(w);
        }
        let column = indent + key.len() + 1;
        table.insert(predicate, arity, template.trim()).map_err(|m| err(column, m))?;
    }
    Ok((table, warnings))
}
