//! The translation between CL4 and CL3 formulas through molecules.
//!
//! For a general letter `P` and `a, b ∈ 1..=m`, the small molecule
//! `P̌ᵃ_b(t⃗)` is an atom of a fresh elementary letter, the medium molecule
//! `P̌ᵃ_⊔(t⃗)` is `P̌ᵃ_1(t⃗) ⊔ … ⊔ P̌ᵃ_m(t⃗)`, and the large molecule is
//! `P̌¹_⊔(t⃗) ⊓ … ⊓ P̌ᵐ_⊔(t⃗)`. Lifting replaces every general atom by its large
//! molecule; floorification maps independent molecules back to atoms.

use crate::syntax::{Atom, Formula, Letter, Term};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("formula contains hybrid letters")]
    Hybrids,
}

/// The molecule letters for a set of general letters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub m: usize,
    /// Naming prefix: the small molecule of `P` at `(a, b)` is `{prefix}P_a_b`.
    pub prefix: String,
    /// General letters covered, with their arities.
    pub letters: BTreeSet<(String, usize)>,
}

/// Which molecule a subformula is.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Molecule {
    Small { letter: String, a: usize, b: usize },
    Medium { letter: String, a: usize },
    Large { letter: String },
}

impl Molecule {
    pub fn letter(&self) -> &str {
        match self {
            Molecule::Small { letter, .. } | Molecule::Medium { letter, .. } | Molecule::Large { letter } => letter,
        }
    }
}

impl Signature {
    /// A signature for the general letters of `f` with the given `m`, its
    /// names chosen to avoid every letter of `f`.
    pub fn for_formula(f: &Formula, m: usize) -> Signature {
        let letters: BTreeSet<(String, usize)> = f.general_letters().into_iter().collect();
        let used = f.letter_names();
        let mut prefix = "m".to_string();
        loop {
            let sig = Signature { m: m.max(2), prefix: prefix.clone(), letters: letters.clone() };
            if sig.all_names().iter().all(|n| !used.contains(n)) {
                return sig;
            }
            prefix.push('m');
        }
    }

    pub fn small_name(&self, letter: &str, a: usize, b: usize) -> String {
        format!("{}{letter}_{a}_{b}", self.prefix)
    }

    fn all_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (p, _) in &self.letters {
            for a in 1..=self.m {
                for b in 1..=self.m {
                    out.push(self.small_name(p, a, b));
                }
            }
        }
        out
    }

    pub fn small(&self, letter: &str, a: usize, b: usize, args: &[Term]) -> Formula {
        Formula::elementary(&self.small_name(letter, a, b), args.to_vec())
    }

    pub fn medium(&self, letter: &str, a: usize, args: &[Term]) -> Formula {
        Formula::ChoiceOr((1..=self.m).map(|b| self.small(letter, a, b, args)).collect())
    }

    pub fn large(&self, letter: &str, args: &[Term]) -> Formula {
        Formula::ChoiceAnd((1..=self.m).map(|a| self.medium(letter, a, args)).collect())
    }

    /// Decode a small-molecule atom.
    fn decode_small(&self, atom: &Atom) -> Option<(String, usize, usize)> {
        let Letter::Elementary(name) = &atom.letter else { return None };
        let rest = name.strip_prefix(self.prefix.as_str())?;
        let (head, b) = rest.rsplit_once('_')?;
        let (letter, a) = head.rsplit_once('_')?;
        let (a, b): (usize, usize) = (a.parse().ok()?, b.parse().ok()?);
        let known = self.letters.contains(&(letter.to_string(), atom.arity()));
        (known && (1..=self.m).contains(&a) && (1..=self.m).contains(&b) && self.small_name(letter, a, b) == *name)
            .then(|| (letter.to_string(), a, b))
    }

    /// If `f` is a molecule, which one, and its arguments.
    pub fn recognize(&self, f: &Formula) -> Option<(Molecule, Vec<Term>)> {
        match f {
            Formula::Atom(atom) => {
                let (letter, a, b) = self.decode_small(atom)?;
                Some((Molecule::Small { letter, a, b }, atom.args.clone()))
            }
            Formula::ChoiceOr(cs) if cs.len() == self.m => {
                let Formula::Atom(first) = &cs[0] else { return None };
                let (letter, a, _) = self.decode_small(first)?;
                (*f == self.medium(&letter, a, &first.args)).then(|| (Molecule::Medium { letter, a }, first.args.clone()))
            }
            Formula::ChoiceAnd(cs) if cs.len() == self.m => {
                let (Molecule::Medium { letter, .. }, args) = self.recognize(&cs[0])? else { return None };
                (*f == self.large(&letter, &args)).then(|| (Molecule::Large { letter }, args))
            }
            _ => None,
        }
    }
}

/// `⌈f⌉` together with the signature used. `m` is the number of general
/// atom occurrences in `f`, and at least 2.
pub fn lift(f: &Formula) -> Result<(Formula, Signature), TranslateError> {
    if f.has_hybrids() {
        return Err(TranslateError::Hybrids);
    }
    let sig = Signature::for_formula(f, f.general_atom_count());
    Ok((lift_with(f, &sig), sig))
}

pub fn lift_with(f: &Formula, sig: &Signature) -> Formula {
    f.map_atoms(&mut |a| match &a.letter {
        Letter::General(p) => sig.large(p, &a.args),
        _ => Formula::Atom(a.clone()),
    })
}

/// An independent molecule occurrence: not part of a larger molecule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Independent {
    pub molecule: Molecule,
    pub args: Vec<Term>,
    pub positive: bool,
    /// Not in the scope of a choice operator.
    pub surface: bool,
}

/// All independent molecule occurrences of `e`, left to right.
pub fn independent_occurrences(e: &Formula, sig: &Signature) -> Vec<Independent> {
    fn go(f: &Formula, sig: &Signature, positive: bool, surface: bool, out: &mut Vec<Independent>) {
        if let Some((molecule, args)) = sig.recognize(f) {
            out.push(Independent { molecule, args, positive, surface });
            return;
        }
        match f {
            Formula::Atom(_) => {}
            Formula::Not(g) => go(g, sig, !positive, surface, out),
            Formula::Implies(a, b) => {
                go(a, sig, !positive, surface, out);
                go(b, sig, positive, surface, out);
            }
            _ => {
                let surface = surface && !f.is_choice();
                for c in f.children() {
                    go(c, sig, positive, surface, out);
                }
            }
        }
    }
    let mut out = Vec::new();
    go(e, sig, true, true, &mut out);
    out
}

/// `⌊e⌋`: every independent large and medium molecule, and every isolated
/// small one, becomes the general atom of its base.
pub fn floorify(e: &Formula, sig: &Signature) -> Formula {
    let mut counts: BTreeMap<Molecule, usize> = BTreeMap::new();
    for occ in independent_occurrences(e, sig) {
        *counts.entry(occ.molecule).or_default() += 1;
    }
    fn go(f: &Formula, sig: &Signature, counts: &BTreeMap<Molecule, usize>) -> Formula {
        if let Some((m, args)) = sig.recognize(f) {
            let isolated = !matches!(m, Molecule::Small { .. }) || counts.get(&m) == Some(&1);
            return if isolated { Formula::general(m.letter(), args) } else { f.clone() };
        }
        f.map_children(|g| go(g, sig, counts))
    }
    go(e, sig, &counts)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodViolation {
    pub cond: u8,
    pub detail: String,
}

impl fmt::Display for GoodViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cond{}: {}", self.cond, self.detail)
    }
}

/// Check the four goodness conditions, reporting the first that fails.
pub fn is_good(e: &Formula, sig: &Signature) -> Result<(), GoodViolation> {
    let occs = independent_occurrences(e, sig);
    let fail = |cond, detail: String| Err(GoodViolation { cond, detail });
    if occs.len() > sig.m {
        return fail(1, format!("{} independent molecule occurrences, m = {}", occs.len(), sig.m));
    }
    if let Some(o) = occs.iter().find(|o| !o.surface && !matches!(o.molecule, Molecule::Large { .. })) {
        return fail(2, format!("non-surface independent {:?}", o.molecule));
    }
    let mut small: BTreeMap<(&Molecule, bool), usize> = BTreeMap::new();
    for o in occs.iter().filter(|o| matches!(o.molecule, Molecule::Small { .. })) {
        *small.entry((&o.molecule, o.positive)).or_default() += 1;
    }
    if let Some(((m, pos), _)) = small.iter().find(|(_, n)| **n > 1) {
        return fail(3, format!("{m:?} has several {} independent occurrences", if *pos { "positive" } else { "negative" }));
    }
    for o in occs.iter().filter(|o| o.positive) {
        let Molecule::Medium { letter, a } = &o.molecule else { continue };
        let same = |p: &Independent| p.positive && p.molecule == o.molecule;
        if occs.iter().filter(|p| same(p)).count() > 1 {
            return fail(4, format!("{letter} medium molecule {a} occurs positively more than once"));
        }
        let clash = occs.iter().any(|p| {
            p.positive && matches!(&p.molecule, Molecule::Small { letter: l, a: x, .. } if l == letter && x == a)
        });
        if clash {
            return fail(4, format!("{letter} medium molecule {a} occurs positively with a positive small one"));
        }
    }
    Ok(())
}
