//! Elementarization and classical validity.
//!
//! Quantifier-free elementary formulas are decided exactly through a DPLL
//! core. Formulas with `∀`/`∃` go through a budgeted first-order checker:
//! Herbrand ground instantiation for validity and finite-model search for
//! invalidity.

mod fol;
pub(crate) mod sat;

use crate::syntax::{Atom, Formula, Letter, Polarity, Term};
use sat::Prop;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

/// Resource limits for the first-order checker.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Maximum Herbrand term depth tried when looking for a refutation.
    pub max_depth: usize,
    /// Largest domain size searched for a countermodel.
    pub max_domain: usize,
    /// Cap on ground formula nodes produced in one attempt.
    pub max_ground: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_depth: 3, max_domain: 3, max_ground: 200_000 }
    }
}

/// A finite structure falsifying a formula. Atom keys print the letter applied
/// to domain elements, e.g. `p(0, 1)`; absent atoms are false. `terms` maps
/// constants and free variables to domain elements; unlisted ones read as 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Countermodel {
    pub domain: usize,
    pub terms: BTreeMap<String, usize>,
    pub atoms: BTreeMap<String, bool>,
}

impl Countermodel {
    fn element(&self, t: &Term, env: &[(String, usize)]) -> usize {
        match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(x, _)| x == v)
                .map(|(_, e)| *e)
                .unwrap_or_else(|| self.terms.get(v).copied().unwrap_or(0)),
            Term::Const(c) => self.terms.get(&c.to_string()).copied().unwrap_or(0),
        }
    }

    /// Truth value of an elementary formula in this structure.
    pub fn evaluate(&self, f: &Formula) -> bool {
        self.eval(f, &mut Vec::new())
    }

    fn eval(&self, f: &Formula, env: &mut Vec<(String, usize)>) -> bool {
        match f {
            Formula::Atom(a) => match &a.letter {
                Letter::Top => true,
                Letter::Bottom => false,
                _ => {
                    let args = a.args.iter().map(|t| Term::Const(self.element(t, env) as u64)).collect();
                    let key = Atom::new(a.letter.clone(), args).to_string();
                    self.atoms.get(&key).copied().unwrap_or(false)
                }
            },
            Formula::Not(g) => !self.eval(g, env),
            Formula::And(cs) => cs.iter().all(|c| self.eval(c, env)),
            Formula::Or(cs) => cs.iter().any(|c| self.eval(c, env)),
            Formula::Implies(a, b) => !self.eval(a, env) || self.eval(b, env),
            Formula::Forall(x, g) | Formula::Exists(x, g) => {
                let universal = matches!(f, Formula::Forall(..));
                let mut result = universal;
                for e in 0..self.domain {
                    env.push((x.clone(), e));
                    let v = self.eval(g, env);
                    env.pop();
                    if v != universal {
                        result = v;
                        break;
                    }
                }
                result
            }
            _ => panic!("countermodels evaluate elementary formulas only"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Valid,
    Invalid(Countermodel),
    Unknown(String),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    pub fn is_invalid(&self) -> bool {
        matches!(self, Verdict::Invalid(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassicalError {
    #[error("formula contains quantifiers")]
    Quantified,
    #[error("formula is not elementary")]
    NotElementary,
}

/// The elementarization ‖E‖.
pub fn elementarize(h: &Formula) -> Formula {
    elem(h, Polarity::Positive)
}

fn elem(h: &Formula, pol: Polarity) -> Formula {
    match h {
        Formula::ChoiceAnd(_) | Formula::ChoiceForall(..) => Formula::top(),
        Formula::ChoiceOr(_) | Formula::ChoiceExists(..) => Formula::bottom(),
        Formula::Atom(a) => match &a.letter {
            Letter::General(_) if pol.is_positive() => Formula::bottom(),
            Letter::General(_) => Formula::top(),
            Letter::Hybrid { elementary, .. } => {
                Formula::atom(Letter::Elementary(elementary.clone()), a.args.clone())
            }
            _ => h.clone(),
        },
        Formula::Not(g) => Formula::not(elem(g, pol.flip())),
        Formula::Implies(a, b) => Formula::implies(elem(a, pol.flip()), elem(b, pol)),
        _ => h.map_children(|g| elem(g, pol)),
    }
}

/// Propositional skeleton of a quantifier-free elementary formula. Distinct
/// atoms (letter plus exact arguments) become distinct variables.
fn skeleton(f: &Formula, atoms: &mut Vec<Atom>, index: &mut HashMap<Atom, usize>) -> Prop {
    match f {
        Formula::Atom(a) => match a.letter {
            Letter::Top => Prop::Const(true),
            Letter::Bottom => Prop::Const(false),
            _ => {
                let v = *index.entry(a.clone()).or_insert_with(|| {
                    atoms.push(a.clone());
                    atoms.len() - 1
                });
                Prop::Var(v)
            }
        },
        Formula::Not(g) => Prop::Not(Box::new(skeleton(g, atoms, index))),
        Formula::And(cs) => Prop::And(cs.iter().map(|c| skeleton(c, atoms, index)).collect()),
        Formula::Or(cs) => Prop::Or(cs.iter().map(|c| skeleton(c, atoms, index)).collect()),
        Formula::Implies(a, b) => Prop::Or(vec![
            Prop::Not(Box::new(skeleton(a, atoms, index))),
            skeleton(b, atoms, index),
        ]),
        _ => unreachable!("quantifier-free elementary input"),
    }
}

/// A falsifying assignment of a quantifier-free elementary formula, turned
/// into a countermodel where every distinct term is its own element.
fn qf_countermodel(f: &Formula) -> Option<Countermodel> {
    let mut atoms = Vec::new();
    let mut index = HashMap::new();
    let p = skeleton(f, &mut atoms, &mut index);
    let model = sat::satisfiable(&Prop::Not(Box::new(p)), atoms.len())?;
    let mut terms: BTreeMap<String, usize> = BTreeMap::new();
    for a in &atoms {
        for t in &a.args {
            let n = terms.len();
            terms.entry(t.to_string()).or_insert(n);
        }
    }
    let domain = terms.len().max(1);
    let mut table = BTreeMap::new();
    for (a, v) in atoms.iter().zip(model) {
        if v {
            let args = a.args.iter().map(|t| Term::Const(terms[&t.to_string()] as u64)).collect();
            table.insert(Atom::new(a.letter.clone(), args).to_string(), true);
        }
    }
    Some(Countermodel { domain, terms, atoms: table })
}

fn check_elementary(f: &Formula) -> Result<(), ClassicalError> {
    if f.is_elementary() {
        Ok(())
    } else {
        Err(ClassicalError::NotElementary)
    }
}

/// Exact propositional validity of a quantifier-free elementary formula.
pub fn tautology_qf(f: &Formula) -> Result<bool, ClassicalError> {
    check_elementary(f)?;
    if f.has_quantifiers() {
        return Err(ClassicalError::Quantified);
    }
    Ok(qf_countermodel(f).is_none())
}

/// Budgeted classical validity of an elementary formula; free variables are
/// read universally.
pub fn fo_validity(f: &Formula, budget: &Budget) -> Verdict {
    if check_elementary(f).is_err() {
        return Verdict::Unknown("formula is not elementary".into());
    }
    if !f.has_quantifiers() {
        return match qf_countermodel(f) {
            None => Verdict::Valid,
            Some(cm) => Verdict::Invalid(cm),
        };
    }
    let mut notes = Vec::new();
    for level in 0..=budget.max_depth.max(budget.max_domain) {
        if level <= budget.max_depth {
            match fol::herbrand_refutes(f, level, budget.max_ground) {
                Ok(true) => return Verdict::Valid,
                Ok(false) => {}
                Err(e) => notes.push(format!("herbrand depth {level}: {e}")),
            }
        }
        if (1..=budget.max_domain).contains(&level) {
            match fol::countermodel_of_size(f, level, budget.max_ground) {
                Ok(Some(cm)) => return Verdict::Invalid(cm),
                Ok(None) => {}
                Err(e) => notes.push(format!("domain {level}: {e}")),
            }
        }
    }
    let mut reason = format!(
        "no refutation up to term depth {} and no countermodel up to domain size {}",
        budget.max_depth, budget.max_domain
    );
    if !notes.is_empty() {
        reason.push_str(&format!(" ({})", notes.join("; ")));
    }
    Verdict::Unknown(reason)
}

/// Stability: classical validity of the elementarization.
pub fn is_stable(h: &Formula, budget: &Budget) -> Verdict {
    fo_validity(&elementarize(h), budget)
}
