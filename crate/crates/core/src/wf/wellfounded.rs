use crate::program::{AtomSet, Program};

use super::WfError;

/// A partial interpretation: atoms known true and atoms known false.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PartialInterpretation {
    pub pos: AtomSet,
    pub neg: AtomSet,
}

impl PartialInterpretation {
    /// The complete interpretation of `m` over `base`.
    pub fn complete(m: &AtomSet, base: &AtomSet) -> Self {
        PartialInterpretation { pos: m.clone(), neg: base.difference(m).cloned().collect() }
    }

    pub fn is_consistent(&self) -> bool {
        self.pos.is_disjoint(&self.neg)
    }
}

/// Largest number of tentative assumptions `assumptions` will search.
pub const ASSUMPTION_CAP_BITS: usize = 16;

pub(crate) fn ensure_normal(program: &Program) -> Result<(), WfError> {
    if program.has_cardinality() {
        return Err(WfError::NotNormal);
    }
    Ok(())
}

/// Heads of rules whose positive body lies in `s` and whose negative body
/// avoids `v`.
pub fn immediate_consequence(program: &Program, v: &AtomSet, s: &AtomSet) -> Result<AtomSet, WfError> {
    ensure_normal(program)?;
    Ok(program
        .rules
        .iter()
        .filter(|r| r.pos.iter().all(|a| s.contains(a)) && !r.neg.iter().any(|a| v.contains(a)))
        .filter_map(|r| r.head.clone())
        .collect())
}

fn lfp(program: &Program, v: &AtomSet) -> AtomSet {
    let mut s = AtomSet::new();
    loop {
        let next: AtomSet = program
            .rules
            .iter()
            .filter(|r| r.pos.iter().all(|a| s.contains(a)) && !r.neg.iter().any(|a| v.contains(a)))
            .filter_map(|r| r.head.clone())
            .collect();
        if next == s {
            return s;
        }
        s = next;
    }
}

/// The well-founded model over the program's own atoms.
pub fn well_founded_model(program: &Program) -> Result<PartialInterpretation, WfError> {
    well_founded_model_over(program, &program.herbrand_base())
}

/// The well-founded model, with false atoms taken relative to `base`.
pub fn well_founded_model_over(program: &Program, base: &AtomSet) -> Result<PartialInterpretation, WfError> {
    ensure_normal(program)?;
    let positive = Program::new(program.rules.iter().filter(|r| r.neg.is_empty()).cloned().collect());
    let mut k = lfp(&positive, &AtomSet::new());
    let mut u = lfp(program, &k);
    loop {
        let k_next = lfp(program, &u);
        let u_next = lfp(program, &k_next);
        if k_next == k && u_next == u {
            break;
        }
        k = k_next;
        u = u_next;
    }
    let neg = base.iter().filter(|a| !u.contains(*a)).cloned().collect();
    Ok(PartialInterpretation { pos: k, neg })
}

/// False atoms of `m` that occur negated and that the well-founded model
/// leaves undecided.
pub fn tentative_assumptions(program: &Program, m: &AtomSet) -> Result<AtomSet, WfError> {
    let wf = well_founded_model(program)?;
    Ok(program
        .negated_atoms()
        .into_iter()
        .filter(|a| !m.contains(a) && !wf.pos.contains(a) && !wf.neg.contains(a))
        .collect())
}

/// The program without the rules whose head is in `u`.
pub fn negative_reduct(program: &Program, u: &AtomSet) -> Program {
    Program::new(program.rules.iter().filter(|r| r.head.as_ref().is_none_or(|h| !u.contains(h))).cloned().collect())
}

/// Every subset of the tentative assumptions whose negative reduct has `m`
/// as its well-founded model.
pub fn assumptions(program: &Program, m: &AtomSet) -> Result<Vec<AtomSet>, WfError> {
    let ta: Vec<_> = tentative_assumptions(program, m)?.into_iter().collect();
    if ta.len() > ASSUMPTION_CAP_BITS {
        return Err(WfError::CapExceeded { what: "tentative assumptions", size: ta.len(), cap: ASSUMPTION_CAP_BITS });
    }
    let mut base = program.herbrand_base();
    base.extend(m.iter().cloned());
    let target = PartialInterpretation::complete(m, &base);
    let mut out = Vec::new();
    for mask in 0u32..(1 << ta.len()) {
        let u: AtomSet = ta.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, a)| a.clone()).collect();
        if well_founded_model_over(&negative_reduct(program, &u), &base)? == target {
            out.push(u);
        }
    }
    Ok(out)
}
