//! Single-step rule checking.

use super::Rule;
use crate::classical::{is_stable, Budget, Verdict};
use crate::syntax::{
    binders_on_path, fresh_variable, is_variable_name, match_except_at, replace_at, resolve,
    surface_occurrences, Address, Formula, Letter, Polarity, Term,
};

/// The premise set Rule A demands of `e`, with the smallest fresh variable
/// standing for `y` in the choice-quantifier clause.
pub fn premises_a(e: &Formula) -> Vec<Formula> {
    let y = Term::Var(fresh_variable(&e.all_variables()));
    let mut out: Vec<Formula> = Vec::new();
    for occ in surface_occurrences(e) {
        let replacements: Vec<Formula> = match (&occ.quasiatom, occ.polarity) {
            (Formula::ChoiceAnd(cs), Polarity::Positive) | (Formula::ChoiceOr(cs), Polarity::Negative) => {
                cs.clone()
            }
            (Formula::ChoiceForall(x, g), Polarity::Positive)
            | (Formula::ChoiceExists(x, g), Polarity::Negative) => vec![g.substitute(x, &y)],
            _ => continue,
        };
        for r in replacements {
            let h = replace_at(e, &occ.address, &r).expect("surface address");
            if !out.contains(&h) {
                out.push(h);
            }
        }
    }
    out
}

/// Does some free occurrence of `x` in `g` sit in the scope of a quantifier
/// binding `t`?
fn captured(g: &Formula, x: &str, t: &str) -> bool {
    fn go(g: &Formula, x: &str, t: &str, under_t: bool) -> bool {
        match g {
            Formula::Atom(a) => under_t && a.args.iter().any(|s| s.as_var() == Some(x)),
            _ => match g.binder() {
                Some((_, y, _)) if y == x => false,
                Some((_, y, body)) => go(body, x, t, under_t || y == t),
                None => g.children().into_iter().any(|c| go(c, x, t, under_t)),
            },
        }
    }
    go(g, x, t, false)
}

/// The Rule B2 side condition for instantiating the choice quantifier at
/// `addr` with `t`.
pub(crate) fn b2_term_allowed(e: &Formula, addr: &Address, t: &Term) -> bool {
    let Term::Var(tv) = t else { return true };
    let Some((q, _)) = resolve(e, addr) else { return false };
    let Some((_, x, g)) = q.binder() else { return false };
    let binders = binders_on_path(e, addr).unwrap_or_default();
    !binders.iter().any(|(_, y)| y == tv) && !captured(g, x, tv)
}

fn one_premise<'a>(premises: &[&'a Formula]) -> Result<&'a Formula, String> {
    match premises {
        [h] => Ok(h),
        _ => Err(format!("expected exactly one premise, got {}", premises.len())),
    }
}

fn expect_premise(expected: &Formula, h: &Formula) -> Result<(), String> {
    if expected == h {
        Ok(())
    } else {
        Err(format!("premise should be {expected}, found {h}"))
    }
}

fn check_a(e: &Formula, premises: &[&Formula], budget: &Budget) -> Result<(), String> {
    match is_stable(e, budget) {
        Verdict::Valid => {}
        Verdict::Invalid(_) => return Err("conclusion is not stable".into()),
        Verdict::Unknown(why) => return Err(format!("stability unverified: {why}")),
    }
    let used = e.all_variables();
    for occ in surface_occurrences(e) {
        match (&occ.quasiatom, occ.polarity) {
            (Formula::ChoiceAnd(cs), Polarity::Positive) | (Formula::ChoiceOr(cs), Polarity::Negative) => {
                for (i, g) in cs.iter().enumerate() {
                    let h = replace_at(e, &occ.address, g).expect("surface address");
                    if !premises.contains(&&h) {
                        return Err(format!(
                            "missing premise for component {} at {}: {h}",
                            i + 1,
                            occ.address
                        ));
                    }
                }
            }
            (Formula::ChoiceForall(x, g), Polarity::Positive)
            | (Formula::ChoiceExists(x, g), Polarity::Negative) => {
                let found = premises.iter().any(|h| {
                    let Some(sub) = match_except_at(e, h, &occ.address) else { return false };
                    let mut candidates: Vec<String> =
                        sub.free_variables().into_iter().filter(|y| !used.contains(y)).collect();
                    candidates.push(fresh_variable(&used));
                    candidates.iter().any(|y| g.substitute(x, &Term::Var(y.clone())) == *sub)
                });
                if !found {
                    return Err(format!(
                        "missing premise instantiating {} at {} with a fresh variable",
                        occ.quasiatom, occ.address
                    ));
                }
            }
            _ => {}
        }
    }
    Ok(())
}

fn check_b1(e: &Formula, addr: &Address, index: usize, h: &Formula) -> Result<(), String> {
    let (q, pol) = resolve(e, addr).ok_or_else(|| format!("address {addr} does not resolve"))?;
    let cs = match (q, pol) {
        (Formula::ChoiceAnd(cs), Polarity::Negative) | (Formula::ChoiceOr(cs), Polarity::Positive) => cs,
        _ => return Err(format!("{addr} is not a negative choice conjunction or positive choice disjunction")),
    };
    let g = index
        .checked_sub(1)
        .and_then(|i| cs.get(i))
        .ok_or_else(|| format!("component index {index} out of range"))?;
    expect_premise(&replace_at(e, addr, g).expect("resolved"), h)
}

fn check_b2(e: &Formula, addr: &Address, t: &Term, h: &Formula) -> Result<(), String> {
    let (q, pol) = resolve(e, addr).ok_or_else(|| format!("address {addr} does not resolve"))?;
    let (x, g) = match (q, pol) {
        (Formula::ChoiceForall(x, g), Polarity::Negative) | (Formula::ChoiceExists(x, g), Polarity::Positive) => {
            (x, g)
        }
        _ => return Err(format!("{addr} is not a negative choice universal or positive choice existential")),
    };
    if let Term::Var(tv) = t {
        let binders = binders_on_path(e, addr).expect("resolved");
        if binders.iter().any(|(_, y)| y == tv) {
            return Err(format!("the occurrence at {addr} is in the scope of a quantifier on {tv}"));
        }
        if captured(g, x, tv) {
            return Err(format!("a free occurrence of {x} is in the scope of a quantifier on {tv}"));
        }
    }
    expect_premise(&replace_at(e, addr, &g.substitute(x, t)).expect("resolved"), h)
}

fn check_c(e: &Formula, pos: &Address, neg: &Address, elem: &str, h: &Formula) -> Result<(), String> {
    let general_at = |a: &Address, want: Polarity| -> Result<(String, Vec<Term>), String> {
        match resolve(e, a) {
            Some((Formula::Atom(at), pol)) if pol == want => match &at.letter {
                Letter::General(n) => Ok((n.clone(), at.args.clone())),
                _ => Err(format!("{a} is not a general atom")),
            },
            Some((_, pol)) if pol != want => Err(format!("{a} has the wrong polarity")),
            Some(_) => Err(format!("{a} is not an atom")),
            None => Err(format!("address {a} does not resolve")),
        }
    };
    let (p1, args1) = general_at(pos, Polarity::Positive)?;
    let (p2, args2) = general_at(neg, Polarity::Negative)?;
    if p1 != p2 || args1.len() != args2.len() {
        return Err(format!("{pos} and {neg} are not occurrences of the same general letter"));
    }
    let well_formed = elem.chars().next().is_some_and(|c| c.is_ascii_lowercase())
        && elem.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !is_variable_name(elem);
    if !well_formed {
        return Err(format!("{elem} is not an elementary letter name"));
    }
    if e.elementary_letter_names().contains(&(elem.to_string(), args1.len())) {
        return Err(format!("{elem} occurs in the conclusion"));
    }
    let q = |args: Vec<Term>| Formula::atom(Letter::Elementary(elem.to_string()), args);
    let step1 = replace_at(e, pos, &q(args1)).expect("resolved");
    let expected = replace_at(&step1, neg, &q(args2)).expect("resolved");
    expect_premise(&expected, h)
}

fn check_c_hybrid(e: &Formula, general: &str, elementary: &str, h: &Formula) -> Result<(), String> {
    let matching: Vec<_> = h
        .hybrid_letters()
        .into_iter()
        .filter(|l| l.general == general && l.elementary == elementary)
        .collect();
    let [hl] = matching.as_slice() else {
        return Err(format!("premise must contain exactly one hybrid letter {general}#{elementary}"));
    };
    expect_conclusion(&h.dehybridize_letter(hl), e)
}

fn expect_conclusion(expected: &Formula, e: &Formula) -> Result<(), String> {
    if expected == e {
        Ok(())
    } else {
        Err(format!("conclusion should be {expected}"))
    }
}

/// Check one rule application. `premises` are the premise formulas in order.
pub fn check_step(e: &Formula, rule: &Rule, premises: &[&Formula], budget: &Budget) -> Result<(), String> {
    match rule {
        Rule::A => check_a(e, premises, budget),
        Rule::B1 { addr, index } => check_b1(e, addr, *index, one_premise(premises)?),
        Rule::B2 { addr, term } => check_b2(e, addr, term, one_premise(premises)?),
        Rule::C { pos, neg, elem } => check_c(e, pos, neg, elem, one_premise(premises)?),
        Rule::CHybrid { general, elementary } => check_c_hybrid(e, general, elementary, one_premise(premises)?),
    }
}
