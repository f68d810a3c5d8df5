//! Formulas and hyperformulas: representation, parsing, printing, occurrence
//! analysis, substitution and structural measures.

mod fresh;
mod occurrence;
mod parse;
mod print;
mod reasonable;

use std::collections::BTreeSet;
use std::fmt;

pub use fresh::{fresh_elementary_letter, fresh_variable, is_variable_name};
pub use occurrence::{
    binders_on_path, match_except_at, parse_move, polarity_at, replace_at, resolve,
    surface_occurrences, Address, Occurrence, Polarity,
};
pub use parse::{parse, ParseError};
pub use reasonable::{is_balanced, is_reasonable, unreasonable_letters, Reasonableness};

/// A term: a variable or a natural-number constant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(u64),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

/// A predicate letter. Arity is carried by the atom's argument list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Top,
    Bottom,
    Elementary(String),
    General(String),
    /// `P_q`: general component `P`, elementary component `q`.
    Hybrid { general: String, elementary: String },
}

impl Letter {
    pub fn is_general(&self) -> bool {
        matches!(self, Letter::General(_))
    }

    pub fn is_hybrid(&self) -> bool {
        matches!(self, Letter::Hybrid { .. })
    }

    pub fn is_logical(&self) -> bool {
        matches!(self, Letter::Top | Letter::Bottom)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Top => f.write_str("T"),
            Letter::Bottom => f.write_str("F"),
            Letter::Elementary(n) | Letter::General(n) => f.write_str(n),
            Letter::Hybrid { general, elementary } => write!(f, "{general}#{elementary}"),
        }
    }
}

/// A hybrid letter identified by its components and arity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HybridLetter {
    pub general: String,
    pub elementary: String,
    pub arity: usize,
}

impl HybridLetter {
    pub fn letter(&self) -> Letter {
        Letter::Hybrid { general: self.general.clone(), elementary: self.elementary.clone() }
    }
}

impl fmt::Display for HybridLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.general, self.elementary)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub letter: Letter,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(letter: Letter, args: Vec<Term>) -> Atom {
        Atom { letter, args }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn hybrid(&self) -> Option<HybridLetter> {
        match &self.letter {
            Letter::Hybrid { general, elementary } => Some(HybridLetter {
                general: general.clone(),
                elementary: elementary.clone(),
                arity: self.args.len(),
            }),
            _ => None,
        }
    }
}

/// A hyperformula. A formula is a hyperformula without hybrid letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    ChoiceAnd(Vec<Formula>),
    ChoiceOr(Vec<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
    ChoiceForall(String, Box<Formula>),
    ChoiceExists(String, Box<Formula>),
}

pub type HyperFormula = Formula;

/// The four quantifier kinds; used when reasoning about scopes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantifier {
    Forall,
    Exists,
    ChoiceForall,
    ChoiceExists,
}

impl Formula {
    pub fn atom(letter: Letter, args: Vec<Term>) -> Formula {
        Formula::Atom(Atom::new(letter, args))
    }

    pub fn top() -> Formula {
        Formula::atom(Letter::Top, vec![])
    }

    pub fn bottom() -> Formula {
        Formula::atom(Letter::Bottom, vec![])
    }

    pub fn general(name: &str, args: Vec<Term>) -> Formula {
        Formula::atom(Letter::General(name.to_string()), args)
    }

    pub fn elementary(name: &str, args: Vec<Term>) -> Formula {
        Formula::atom(Letter::Elementary(name.to_string()), args)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// Quantifier binder at the root, if any.
    pub fn binder(&self) -> Option<(Quantifier, &str, &Formula)> {
        match self {
            Formula::Forall(x, b) => Some((Quantifier::Forall, x, b)),
            Formula::Exists(x, b) => Some((Quantifier::Exists, x, b)),
            Formula::ChoiceForall(x, b) => Some((Quantifier::ChoiceForall, x, b)),
            Formula::ChoiceExists(x, b) => Some((Quantifier::ChoiceExists, x, b)),
            _ => None,
        }
    }

    /// Direct subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) => vec![],
            Formula::Not(g) => vec![g],
            Formula::And(cs) | Formula::Or(cs) | Formula::ChoiceAnd(cs) | Formula::ChoiceOr(cs) => {
                cs.iter().collect()
            }
            Formula::Implies(a, b) => vec![a, b],
            Formula::Forall(_, g)
            | Formula::Exists(_, g)
            | Formula::ChoiceForall(_, g)
            | Formula::ChoiceExists(_, g) => vec![g],
        }
    }

    /// Rebuild this node with every direct child mapped through `f`.
    pub fn map_children(&self, mut f: impl FnMut(&Formula) -> Formula) -> Formula {
        let bx = |g: &Formula, f: &mut dyn FnMut(&Formula) -> Formula| Box::new(f(g));
        match self {
            Formula::Atom(a) => Formula::Atom(a.clone()),
            Formula::Not(g) => Formula::Not(bx(g, &mut f)),
            Formula::And(cs) => Formula::And(cs.iter().map(&mut f).collect()),
            Formula::Or(cs) => Formula::Or(cs.iter().map(&mut f).collect()),
            Formula::ChoiceAnd(cs) => Formula::ChoiceAnd(cs.iter().map(&mut f).collect()),
            Formula::ChoiceOr(cs) => Formula::ChoiceOr(cs.iter().map(&mut f).collect()),
            Formula::Implies(a, b) => {
                let a = bx(a, &mut f);
                Formula::Implies(a, bx(b, &mut f))
            }
            Formula::Forall(x, g) => Formula::Forall(x.clone(), bx(g, &mut f)),
            Formula::Exists(x, g) => Formula::Exists(x.clone(), bx(g, &mut f)),
            Formula::ChoiceForall(x, g) => Formula::ChoiceForall(x.clone(), bx(g, &mut f)),
            Formula::ChoiceExists(x, g) => Formula::ChoiceExists(x.clone(), bx(g, &mut f)),
        }
    }

    /// Rewrite every atom (including those under choice operators).
    pub fn map_atoms(&self, f: &mut dyn FnMut(&Atom) -> Formula) -> Formula {
        match self {
            Formula::Atom(a) => f(a),
            _ => self.map_children(|g| g.map_atoms(f)),
        }
    }

    /// Visit every atom in left-to-right order.
    pub fn for_each_atom<'a>(&'a self, f: &mut dyn FnMut(&'a Atom)) {
        match self {
            Formula::Atom(a) => f(a),
            _ => {
                for c in self.children() {
                    c.for_each_atom(f);
                }
            }
        }
    }

    pub fn is_choice(&self) -> bool {
        matches!(
            self,
            Formula::ChoiceAnd(_)
                | Formula::ChoiceOr(_)
                | Formula::ChoiceForall(..)
                | Formula::ChoiceExists(..)
        )
    }

    /// Atoms and choice-rooted formulas are the quasiatom shapes.
    pub fn is_quasiatom_shape(&self) -> bool {
        matches!(self, Formula::Atom(_)) || self.is_choice()
    }

    pub fn has_blind_quantifiers(&self) -> bool {
        match self {
            Formula::Forall(..) | Formula::Exists(..) => true,
            _ => self.children().into_iter().any(|c| c.has_blind_quantifiers()),
        }
    }

    pub fn has_quantifiers(&self) -> bool {
        self.binder().is_some() || self.children().into_iter().any(|c| c.has_quantifiers())
    }

    pub fn has_choice(&self) -> bool {
        self.is_choice() || self.children().into_iter().any(|c| c.has_choice())
    }

    pub fn has_hybrids(&self) -> bool {
        let mut found = false;
        self.for_each_atom(&mut |a| found |= a.letter.is_hybrid());
        found
    }

    pub fn has_general_atoms(&self) -> bool {
        let mut found = false;
        self.for_each_atom(&mut |a| found |= a.letter.is_general());
        found
    }

    /// No choice operators, no general atoms, no hybrid atoms.
    pub fn is_elementary(&self) -> bool {
        let mut ok = !self.has_choice();
        self.for_each_atom(&mut |a| {
            ok &= !a.letter.is_general() && !a.letter.is_hybrid();
        });
        ok
    }

    /// Variables with at least one free occurrence, in order of first occurrence.
    pub fn free_variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        collect_free_terms(self, &mut Vec::new(), &mut |t| {
            if let Term::Var(v) = t {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        });
        out
    }

    /// Terms with free occurrences (free variables and constants), in order of first occurrence.
    pub fn free_terms(&self) -> Vec<Term> {
        let mut out: Vec<Term> = Vec::new();
        collect_free_terms(self, &mut Vec::new(), &mut |t| {
            if !out.contains(t) {
                out.push(t.clone());
            }
        });
        out
    }

    pub fn constants(&self) -> Vec<u64> {
        let mut out = Vec::new();
        self.for_each_atom(&mut |a| {
            for t in &a.args {
                if let Term::Const(c) = t {
                    if !out.contains(c) {
                        out.push(*c);
                    }
                }
            }
        });
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Every variable name occurring anywhere, bound, free or as a binder.
    pub fn all_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_all_variables(&mut out);
        out
    }

    fn collect_all_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(a) => {
                for t in &a.args {
                    if let Term::Var(v) = t {
                        out.insert(v.clone());
                    }
                }
            }
            _ => {
                if let Some((_, x, _)) = self.binder() {
                    out.insert(x.to_string());
                }
                for c in self.children() {
                    c.collect_all_variables(out);
                }
            }
        }
    }

    /// Names of elementary letters used anywhere, including hybrid components.
    pub fn elementary_letter_names(&self) -> BTreeSet<(String, usize)> {
        let mut out = BTreeSet::new();
        self.for_each_atom(&mut |a| match &a.letter {
            Letter::Elementary(n) => {
                out.insert((n.clone(), a.arity()));
            }
            Letter::Hybrid { elementary, .. } => {
                out.insert((elementary.clone(), a.arity()));
            }
            _ => {}
        });
        out
    }

    /// Every letter name used in the formula regardless of kind or arity.
    pub fn letter_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.for_each_atom(&mut |a| match &a.letter {
            Letter::Elementary(n) | Letter::General(n) => {
                out.insert(n.clone());
            }
            Letter::Hybrid { general, elementary } => {
                out.insert(general.clone());
                out.insert(elementary.clone());
            }
            _ => {}
        });
        out
    }

    /// Distinct general letters (name, arity) in order of first occurrence.
    pub fn general_letters(&self) -> Vec<(String, usize)> {
        let mut out = Vec::new();
        self.for_each_atom(&mut |a| {
            if let Letter::General(n) = &a.letter {
                let key = (n.clone(), a.arity());
                if !out.contains(&key) {
                    out.push(key);
                }
            }
        });
        out
    }

    /// Distinct hybrid letters in order of first occurrence.
    pub fn hybrid_letters(&self) -> Vec<HybridLetter> {
        let mut out = Vec::new();
        self.for_each_atom(&mut |a| {
            if let Some(h) = a.hybrid() {
                if !out.contains(&h) {
                    out.push(h);
                }
            }
        });
        out
    }

    pub fn general_atom_count(&self) -> usize {
        let mut n = 0;
        self.for_each_atom(&mut |a| {
            if a.letter.is_general() {
                n += 1;
            }
        });
        n
    }

    /// Logical operator occurrences plus general atom occurrences. An n-ary
    /// node is a single operator occurrence.
    pub fn aggregate_complexity(&self) -> usize {
        match self {
            Formula::Atom(a) => usize::from(a.letter.is_general()),
            _ => 1 + self.children().into_iter().map(|c| c.aggregate_complexity()).sum::<usize>(),
        }
    }

    /// Replace free occurrences of `x` by `t`. No renaming is performed.
    pub fn substitute(&self, x: &str, t: &Term) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(Atom {
                letter: a.letter.clone(),
                args: a
                    .args
                    .iter()
                    .map(|s| match s {
                        Term::Var(v) if v == x => t.clone(),
                        other => other.clone(),
                    })
                    .collect(),
            }),
            _ => match self.binder() {
                Some((_, y, _)) if y == x => self.clone(),
                _ => self.map_children(|g| g.substitute(x, t)),
            },
        }
    }

    /// Apply several substitutions for free variables simultaneously.
    pub fn substitute_all(&self, map: &dyn Fn(&str) -> Option<Term>) -> Formula {
        self.subst_rec(map, &mut Vec::new())
    }

    fn subst_rec(&self, map: &dyn Fn(&str) -> Option<Term>, bound: &mut Vec<String>) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(Atom {
                letter: a.letter.clone(),
                args: a
                    .args
                    .iter()
                    .map(|s| match s {
                        Term::Var(v) if !bound.contains(v) => map(v).unwrap_or_else(|| s.clone()),
                        other => other.clone(),
                    })
                    .collect(),
            }),
            _ => {
                let pushed = if let Some((_, x, _)) = self.binder() {
                    bound.push(x.to_string());
                    true
                } else {
                    false
                };
                let out = self.map_children(|g| g.subst_rec(map, bound));
                if pushed {
                    bound.pop();
                }
                out
            }
        }
    }

    /// Replace each hybrid letter by its general component.
    pub fn dehybridize(&self) -> Formula {
        self.map_atoms(&mut |a| match &a.letter {
            Letter::Hybrid { general, .. } => {
                Formula::atom(Letter::General(general.clone()), a.args.clone())
            }
            _ => Formula::Atom(a.clone()),
        })
    }

    /// Replace one hybrid letter by its general component.
    pub fn dehybridize_letter(&self, h: &HybridLetter) -> Formula {
        self.map_atoms(&mut |a| match a.hybrid() {
            Some(ref x) if x == h => Formula::atom(Letter::General(h.general.clone()), a.args.clone()),
            _ => Formula::Atom(a.clone()),
        })
    }

    /// Replace an elementary letter (name, arity) everywhere by another letter.
    pub fn rename_elementary(&self, name: &str, arity: usize, to: &Letter) -> Formula {
        self.map_atoms(&mut |a| match &a.letter {
            Letter::Elementary(n) if n == name && a.arity() == arity => {
                Formula::atom(to.clone(), a.args.clone())
            }
            _ => Formula::Atom(a.clone()),
        })
    }
}

fn collect_free_terms<'a>(f: &'a Formula, bound: &mut Vec<&'a str>, out: &mut dyn FnMut(&'a Term)) {
    match f {
        Formula::Atom(a) => {
            for t in &a.args {
                match t {
                    Term::Var(v) if bound.contains(&v.as_str()) => {}
                    _ => out(t),
                }
            }
        }
        _ => {
            let pushed = if let Some((_, x, _)) = f.binder() {
                bound.push(x);
                true
            } else {
                false
            };
            for c in f.children() {
                collect_free_terms(c, bound, out);
            }
            if pushed {
                bound.pop();
            }
        }
    }
}

/// General dehybridization.
pub fn general_dehybridization(h: &Formula) -> Formula {
    h.dehybridize()
}
