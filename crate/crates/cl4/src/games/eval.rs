//! Legality and winners of runs, by recursion on the formula.

use super::{negate_run, GameError, Interpretation, LabMove, Player};
use crate::syntax::{Formula, Term};

/// Parse a component index `1..=n`.
pub(crate) fn parse_index(s: &str, n: usize) -> Option<usize> {
    if s.is_empty() || s.starts_with('0') || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok().filter(|i| (1..=n).contains(i))
}

/// Parse a constant of the universe `0..u`.
pub(crate) fn parse_constant(s: &str, u: u64) -> Option<u64> {
    if s.is_empty() || (s.len() > 1 && s.starts_with('0')) || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok().filter(|c| *c < u)
}

/// Who may move in a choice node, given the node kind.
pub(crate) fn chooser(f: &Formula) -> Option<Player> {
    match f {
        Formula::ChoiceAnd(_) | Formula::ChoiceForall(..) => Some(Player::Bottom),
        Formula::ChoiceOr(_) | Formula::ChoiceExists(..) => Some(Player::Top),
        _ => None,
    }
}

/// Split the moves of a parallel node with `n` children among them, each
/// child receiving its subrun with the `i.` prefix stripped. `None` if some
/// move does not start with a valid index.
fn route(g: &[LabMove], n: usize) -> Option<Vec<Vec<LabMove>>> {
    let mut out = vec![Vec::new(); n];
    for m in g {
        let (tok, rest) = m.mv.split_once('.')?;
        let i = parse_index(tok, n)?;
        out[i - 1].push(LabMove::new(m.player, rest));
    }
    Some(out)
}

fn parallel(f: &Formula) -> Option<(Vec<&Formula>, Vec<bool>)> {
    match f {
        Formula::And(cs) | Formula::Or(cs) => Some((cs.iter().collect(), vec![false; cs.len()])),
        Formula::Implies(a, b) => Some((vec![a, b], vec![true, false])),
        _ => None,
    }
}

/// The component selected by a choice move, if the move is well formed.
pub(crate) fn choose(f: &Formula, payload: &str, u: u64) -> Option<Formula> {
    match f {
        Formula::ChoiceAnd(cs) | Formula::ChoiceOr(cs) => parse_index(payload, cs.len()).map(|i| cs[i - 1].clone()),
        Formula::ChoiceForall(x, g) | Formula::ChoiceExists(x, g) => {
            parse_constant(payload, u).map(|c| g.substitute(x, &Term::Const(c)))
        }
        _ => None,
    }
}

fn legal(f: &Formula, i: &Interpretation, g: &[LabMove]) -> Result<bool, GameError> {
    match f {
        Formula::Atom(a) if a.letter.is_general() || a.letter.is_hybrid() => legal(&i.expand(a)?, i, g),
        Formula::Atom(_) => Ok(g.is_empty()),
        Formula::Not(h) => legal(h, i, &negate_run(g)),
        Formula::Forall(x, h) | Formula::Exists(x, h) => {
            for c in 0..i.universe {
                if !legal(&h.substitute(x, &Term::Const(c)), i, g)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::And(_) | Formula::Or(_) | Formula::Implies(..) => {
            let (cs, flips) = parallel(f).expect("parallel node");
            let Some(subs) = route(g, cs.len()) else { return Ok(false) };
            for ((c, flip), sub) in cs.into_iter().zip(flips).zip(subs) {
                let sub = if flip { negate_run(&sub) } else { sub };
                if !legal(c, i, &sub)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => {
            let Some((first, rest)) = g.split_first() else { return Ok(true) };
            if Some(first.player) != chooser(f) {
                return Ok(false);
            }
            match choose(f, &first.mv, i.universe) {
                Some(h) => legal(&h, i, rest),
                None => Ok(false),
            }
        }
    }
}

fn win(f: &Formula, i: &Interpretation, g: &[LabMove]) -> Result<bool, GameError> {
    match f {
        Formula::Atom(a) if a.letter.is_general() || a.letter.is_hybrid() => win(&i.expand(a)?, i, g),
        Formula::Atom(a) => Ok(i.atom_value(a)),
        Formula::Not(h) => Ok(!win(h, i, &negate_run(g))?),
        Formula::Forall(x, h) | Formula::Exists(x, h) => {
            let all = matches!(f, Formula::Forall(..));
            for c in 0..i.universe {
                if win(&h.substitute(x, &Term::Const(c)), i, g)? != all {
                    return Ok(!all);
                }
            }
            Ok(all)
        }
        Formula::And(_) | Formula::Or(_) | Formula::Implies(..) => {
            let (cs, flips) = parallel(f).expect("parallel node");
            let subs = route(g, cs.len()).expect("legal run");
            let mut vals = Vec::new();
            for ((c, flip), sub) in cs.into_iter().zip(flips).zip(subs) {
                vals.push(if flip { !win(c, i, &negate_run(&sub))? } else { win(c, i, &sub)? });
            }
            Ok(match f {
                Formula::And(_) => vals.iter().all(|v| *v),
                _ => vals.iter().any(|v| *v),
            })
        }
        _ => match g.split_first() {
            None => Ok(chooser(f) == Some(Player::Bottom)),
            Some((first, rest)) => win(&choose(f, &first.mv, i.universe).expect("legal run"), i, rest),
        },
    }
}

fn precheck(f: &Formula, i: &Interpretation) -> Result<(), GameError> {
    if let Some(v) = f.free_variables().into_iter().next() {
        return Err(GameError::Open(v));
    }
    i.covers(f)
}

/// Is `g` a unilegal run of the game `f` denotes under `i`?
pub fn is_unilegal(f: &Formula, i: &Interpretation, g: &[LabMove]) -> Result<bool, GameError> {
    precheck(f, i)?;
    legal(f, i, g)
}

/// The player who wins the legal run `g` of `f` under `i`.
pub fn winner(f: &Formula, i: &Interpretation, g: &[LabMove]) -> Result<Player, GameError> {
    precheck(f, i)?;
    if !legal(f, i, g)? {
        let mut k = 0;
        while legal(f, i, &g[..=k])? {
            k += 1;
        }
        return Err(GameError::Illegal { index: k, mv: g[k].to_string(), reason: "not a legal run".into() });
    }
    win(f, i, g).map(Player::from_bool)
}
