//! Balanced and reasonable hyperformulas.

use super::occurrence::{binders_on_path, surface_occurrences};
use super::{Formula, HybridLetter, Letter, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reasonableness {
    Reasonable,
    Unbalanced(String),
    Unreasonable(HybridLetter),
}

/// Each hybrid letter has exactly two occurrences, both surface, one positive
/// and one negative; its elementary component occurs nowhere else.
pub fn is_balanced(h: &Formula) -> Result<(), String> {
    let occs = surface_occurrences(h);
    for hl in h.hybrid_letters() {
        let mut total = 0;
        h.for_each_atom(&mut |a| {
            if a.hybrid().as_ref() == Some(&hl) {
                total += 1;
            }
        });
        let surface: Vec<_> = occs
            .iter()
            .filter(|o| matches!(&o.quasiatom, Formula::Atom(a) if a.hybrid().as_ref() == Some(&hl)))
            .collect();
        if total != 2 || surface.len() != 2 {
            return Err(format!("{hl} must have exactly two surface occurrences, found {total}"));
        }
        if surface[0].polarity == surface[1].polarity {
            return Err(format!("both occurrences of {hl} have the same polarity"));
        }
        let mut clash = false;
        h.for_each_atom(&mut |a| match &a.letter {
            Letter::Elementary(n) if *n == hl.elementary && a.arity() == hl.arity => clash = true,
            Letter::Hybrid { elementary, .. }
                if *elementary == hl.elementary
                    && a.arity() == hl.arity
                    && a.hybrid().as_ref() != Some(&hl) =>
            {
                clash = true
            }
            _ => {}
        });
        if clash {
            return Err(format!("elementary component of {hl} occurs elsewhere"));
        }
    }
    Ok(())
}

/// Hybrid letters of a balanced `h` whose two atoms disagree on some argument
/// position where both argument occurrences are free.
pub fn unreasonable_letters(h: &Formula) -> Vec<HybridLetter> {
    let occs = surface_occurrences(h);
    let mut out = Vec::new();
    for hl in h.hybrid_letters() {
        let pair: Vec<_> = occs
            .iter()
            .filter_map(|o| match &o.quasiatom {
                Formula::Atom(a) if a.hybrid().as_ref() == Some(&hl) => {
                    let bound: Vec<String> = binders_on_path(h, &o.address)
                        .unwrap_or_default()
                        .into_iter()
                        .map(|(_, x)| x)
                        .collect();
                    Some((a.args.clone(), bound))
                }
                _ => None,
            })
            .collect();
        if pair.len() != 2 {
            continue;
        }
        let free = |t: &Term, bound: &[String]| match t {
            Term::Var(v) => !bound.contains(v),
            Term::Const(_) => true,
        };
        let (a1, b1) = &pair[0];
        let (a2, b2) = &pair[1];
        if a1.iter().zip(a2).any(|(s, t)| free(s, b1) && free(t, b2) && s != t) {
            out.push(hl);
        }
    }
    out
}

pub fn is_reasonable(h: &Formula) -> Reasonableness {
    if let Err(e) = is_balanced(h) {
        return Reasonableness::Unbalanced(e);
    }
    match unreasonable_letters(h).into_iter().next() {
        Some(l) => Reasonableness::Unreasonable(l),
        None => Reasonableness::Reasonable,
    }
}
