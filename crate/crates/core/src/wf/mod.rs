//! Well-founded semantics, e-graphs and offline justifications.

mod convert;
mod egraph;
mod wellfounded;

use thiserror::Error;

pub use convert::{explanation_to_justification, justification_to_explanation};
pub use egraph::{
    check_offline_justification, is_negative_lce, is_offline_justification, is_positive_lce, negative_lces, Context,
    EGraph, ENode, Literal, Sign, Support,
};
pub use wellfounded::{
    assumptions, immediate_consequence, negative_reduct, tentative_assumptions, well_founded_model,
    well_founded_model_over, PartialInterpretation, ASSUMPTION_CAP_BITS,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WfError {
    #[error("normal programs only: cardinality expressions are not supported here")]
    NotNormal,
    #[error("too many {what}: {size} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, size: usize, cap: usize },
    #[error("{0} is not a node of the graph")]
    NodeNotInGraph(String),
    #[error("malformed justification: {0}")]
    Malformed(String),
    #[error("labels not unique")]
    LabelsNotUnique,
}
