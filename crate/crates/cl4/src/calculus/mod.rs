//! CL4 and CL4° proofs: rule checking, whole-proof verification, and the
//! conversions from CL4 proofs to CL4° proofs and from CL4° proofs to
//! reasonable ones.

mod json;
mod rules;
mod transform;

use crate::classical::Budget;
use crate::syntax::{is_balanced, Address, Formula, Term};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

pub use json::ProofFormatError;
pub use rules::{check_step, premises_a};
pub(crate) use rules::b2_term_allowed;
pub use transform::{make_reasonable, to_cl4o, TransformError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum System {
    Cl4,
    Cl4o,
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            System::Cl4 => "CL4",
            System::Cl4o => "CL4o",
        })
    }
}

/// A rule tag with its parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    A,
    B1 { addr: Address, index: usize },
    B2 { addr: Address, term: Term },
    /// Rule C: the general atoms at `pos` and `neg` become `elem`.
    C { pos: Address, neg: Address, elem: String },
    /// Rule C°: both occurrences of the hybrid `general#elementary` become `general`.
    CHybrid { general: String, elementary: String },
}

impl Rule {
    pub fn tag(&self) -> &'static str {
        match self {
            Rule::A => "A",
            Rule::B1 { .. } => "B1",
            Rule::B2 { .. } => "B2",
            Rule::C { .. } => "C",
            Rule::CHybrid { .. } => "Co",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub id: usize,
    pub formula: Formula,
    pub rule: Rule,
    pub premises: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    pub system: System,
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("step {step}: {message}")]
pub struct ProofFailure {
    pub step: usize,
    pub message: String,
}

impl Proof {
    pub fn conclusion(&self) -> Option<&Formula> {
        self.steps.last().map(|s| &s.formula)
    }

    pub fn step(&self, id: usize) -> Option<&Step> {
        self.steps.iter().find(|s| s.id == id)
    }
}

/// Verify every step of `p` in its own system.
pub fn check_proof(p: &Proof, budget: &Budget) -> Result<(), ProofFailure> {
    let fail = |step: usize, message: String| Err(ProofFailure { step, message });
    if p.steps.is_empty() {
        return fail(0, "proof has no steps".into());
    }
    let mut by_id: HashMap<usize, &Formula> = HashMap::new();
    for s in &p.steps {
        if by_id.contains_key(&s.id) {
            return fail(s.id, "duplicate step id".into());
        }
        match p.system {
            System::Cl4 => {
                if s.formula.has_hybrids() {
                    return fail(s.id, "CL4 steps cannot contain hybrid letters".into());
                }
                if matches!(s.rule, Rule::CHybrid { .. }) {
                    return fail(s.id, "rule Co is not a CL4 rule".into());
                }
            }
            System::Cl4o => {
                if let Err(e) = is_balanced(&s.formula) {
                    return fail(s.id, format!("not balanced: {e}"));
                }
                if matches!(s.rule, Rule::C { .. }) {
                    return fail(s.id, "rule C is not a CL4o rule".into());
                }
            }
        }
        let mut premises = Vec::new();
        for &q in &s.premises {
            if q >= s.id {
                return fail(s.id, format!("premise {q} does not precede the step"));
            }
            match by_id.get(&q) {
                Some(f) => premises.push(*f),
                None => return fail(s.id, format!("premise {q} is not an earlier step")),
            }
        }
        if let Err(e) = check_step(&s.formula, &s.rule, &premises, budget) {
            return fail(s.id, e);
        }
        by_id.insert(s.id, &s.formula);
    }
    Ok(())
}
