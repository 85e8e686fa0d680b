//! Text formats: programs, answer sets, look-up tables, DOT and JSON.

pub mod dot;
pub mod json;
mod lookup;
mod parser;

pub use lookup::{parse_lookup, LookupTable, Template};
pub use parser::{parse_answer_set, parse_atom, parse_ground_atom, parse_program, parse_rule, ParseError};
