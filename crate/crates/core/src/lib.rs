//! Explanations for atoms in answer sets of logic programs.
//!
//! The pipeline: parse a program and an answer set ([`io`]), obtain ground
//! rules ([`grounder`]), build the and-or explanation tree of an atom and
//! extract shortest or mutually different explanations ([`explain`]), and
//! render them as text, DOT or JSON ([`nl`], [`io`]). The [`wf`] module
//! relates explanations to offline justifications under the well-founded
//! semantics.

pub mod explain;
pub mod grounder;
pub mod io;
pub mod nl;
pub mod program;
pub mod wf;

pub use explain::{AndOrTree, ExplainError, Explanation, VertexLabeledTree};
pub use grounder::{GroundIndex, OnDemand, RuleSource};
pub use program::{Atom, AtomSet, Program, Rule, Term};
