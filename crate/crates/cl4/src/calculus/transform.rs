//! Proof transformations: CL4 to CL4° (hybridizing the letters introduced by
//! Rule C) and CL4° to reasonable CL4° (dehybridizing unreasonable letters).

use super::{Proof, Rule, Step, System};
use crate::syntax::{is_reasonable, resolve, unreasonable_letters, Formula, Letter, Reasonableness};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("expected a {0} proof")]
    WrongSystem(System),
    #[error("proof has no steps")]
    Empty,
    #[error("step {0} refers to a missing premise")]
    MissingPremise(usize),
    #[error("step {0}: rule C addresses do not resolve to a general atom")]
    BadRuleC(usize),
    #[error("conclusion is not reasonable: {0}")]
    Unreasonable(String),
}

/// Elementary letter (name, arity) renamed to the hybrid with general component.
type Renaming = Vec<((String, usize), String)>;

fn apply(ren: &Renaming, f: &Formula) -> Formula {
    ren.iter().fold(f.clone(), |g, ((q, n), p)| {
        g.rename_elementary(q, *n, &Letter::Hybrid { general: p.clone(), elementary: q.clone() })
    })
}

struct Converter<'p> {
    proof: &'p Proof,
    memo: HashMap<(usize, Renaming), usize>,
    out: Vec<Step>,
}

impl Converter<'_> {
    fn convert(&mut self, id: usize, ren: &Renaming) -> Result<usize, TransformError> {
        let step = self.proof.step(id).ok_or(TransformError::MissingPremise(id))?;
        let letters = step.formula.elementary_letter_names();
        let ren: Renaming = ren.iter().filter(|(k, _)| letters.contains(k)).cloned().collect();
        if let Some(&done) = self.memo.get(&(id, ren.clone())) {
            return Ok(done);
        }
        let (rule, premise_ren) = match &step.rule {
            Rule::C { pos, elem, .. } => {
                let Some((Formula::Atom(a), _)) = resolve(&step.formula, pos) else {
                    return Err(TransformError::BadRuleC(id));
                };
                let Letter::General(p) = &a.letter else { return Err(TransformError::BadRuleC(id)) };
                let key = (elem.clone(), a.arity());
                let mut r: Renaming = ren.iter().filter(|(k, _)| *k != key).cloned().collect();
                r.push((key, p.clone()));
                r.sort();
                (Rule::CHybrid { general: p.clone(), elementary: elem.clone() }, r)
            }
            other => (other.clone(), ren.clone()),
        };
        let mut premises = Vec::new();
        for &q in &step.premises {
            premises.push(self.convert(q, &premise_ren)?);
        }
        let new_id = self.out.len() + 1;
        self.out.push(Step { id: new_id, formula: apply(&ren, &step.formula), rule, premises });
        self.memo.insert((id, ren), new_id);
        Ok(new_id)
    }
}

/// Convert a CL4 proof into a CL4° proof of the same formula: every letter
/// `q` introduced by Rule C in place of `P` becomes the hybrid `P#q` in the
/// premise and everything above it, and the step itself becomes Rule C°.
pub fn to_cl4o(p: &Proof) -> Result<Proof, TransformError> {
    if p.system != System::Cl4 {
        return Err(TransformError::WrongSystem(System::Cl4));
    }
    let last = p.steps.last().ok_or(TransformError::Empty)?.id;
    let mut c = Converter { proof: p, memo: HashMap::new(), out: Vec::new() };
    c.convert(last, &Vec::new())?;
    Ok(Proof { system: System::Cl4o, steps: c.out })
}

fn tilde(f: &Formula) -> Formula {
    unreasonable_letters(f).iter().fold(f.clone(), |g, hl| g.dehybridize_letter(hl))
}

/// Replace every step by its version with unreasonable hybrid letters
/// dehybridized. A Rule C° step whose two sides coincide afterwards takes
/// over the justification of its premise.
pub fn make_reasonable(p: &Proof) -> Result<Proof, TransformError> {
    if p.system != System::Cl4o {
        return Err(TransformError::WrongSystem(System::Cl4o));
    }
    let concl = p.conclusion().ok_or(TransformError::Empty)?;
    match is_reasonable(concl) {
        Reasonableness::Reasonable => {}
        Reasonableness::Unbalanced(e) => return Err(TransformError::Unreasonable(e)),
        Reasonableness::Unreasonable(l) => return Err(TransformError::Unreasonable(format!("{l} is unreasonable"))),
    }
    let mut out: Vec<Step> = Vec::with_capacity(p.steps.len());
    for s in &p.steps {
        let formula = tilde(&s.formula);
        let mut rule = s.rule.clone();
        let mut premises = s.premises.clone();
        if let (Rule::CHybrid { .. }, [q]) = (&s.rule, s.premises.as_slice()) {
            let prev = out.iter().find(|t| t.id == *q).ok_or(TransformError::MissingPremise(s.id))?;
            if prev.formula == formula {
                rule = prev.rule.clone();
                premises = prev.premises.clone();
            }
        }
        out.push(Step { id: s.id, formula, rule, premises });
    }
    Ok(Proof { system: System::Cl4o, steps: out })
}
