//! Canonical forms modulo renaming of letters and variables.
//!
//! Provability is invariant under bijective renaming of variables, of
//! elementary letters and of general letters (arity preserved), so formulas
//! with the same canonical form share a verdict.

use crate::syntax::{Atom, Formula, Letter, Term};
use std::collections::HashMap;

#[derive(Default)]
struct Renamer {
    vars: HashMap<String, String>,
    letters: HashMap<(Letter, usize), Letter>,
}

impl Renamer {
    fn var(&mut self, v: &str) -> String {
        let n = self.vars.len();
        self.vars.entry(v.to_string()).or_insert_with(|| format!("v{n}")).clone()
    }

    fn letter(&mut self, l: &Letter, arity: usize) -> Letter {
        let fresh = match l {
            Letter::Top | Letter::Bottom => return l.clone(),
            Letter::Elementary(_) => Letter::Elementary(format!("e{}", self.letters.len())),
            Letter::General(_) => Letter::General(format!("G{}", self.letters.len())),
            Letter::Hybrid { .. } => {
                let n = self.letters.len();
                Letter::Hybrid { general: format!("G{n}"), elementary: format!("e{n}") }
            }
        };
        self.letters.entry((l.clone(), arity)).or_insert(fresh).clone()
    }

    fn rename(&mut self, f: &Formula) -> Formula {
        match f {
            Formula::Atom(a) => {
                let letter = self.letter(&a.letter, a.arity());
                let args = a
                    .args
                    .iter()
                    .map(|t| match t {
                        Term::Var(v) => Term::Var(self.var(v)),
                        c => c.clone(),
                    })
                    .collect();
                Formula::Atom(Atom::new(letter, args))
            }
            Formula::Forall(x, g) => {
                let x = self.var(x);
                Formula::Forall(x, Box::new(self.rename(g)))
            }
            Formula::Exists(x, g) => {
                let x = self.var(x);
                Formula::Exists(x, Box::new(self.rename(g)))
            }
            Formula::ChoiceForall(x, g) => {
                let x = self.var(x);
                Formula::ChoiceForall(x, Box::new(self.rename(g)))
            }
            Formula::ChoiceExists(x, g) => {
                let x = self.var(x);
                Formula::ChoiceExists(x, Box::new(self.rename(g)))
            }
            _ => f.map_children(|g| self.rename(g)),
        }
    }
}

pub(crate) fn canonical(f: &Formula) -> Formula {
    Renamer::default().rename(f)
}
