//! Residual positions: the game left after a run, with choice moves folded
//! into the formula and the play inside atoms kept per address.

use super::eval::{choose, chooser};
use super::interp::close;
use super::{is_unilegal, prefix_run, winner, GameError, Interpretation, LabMove, Player, Run, Valuation};
use crate::syntax::{parse_move, replace_at, resolve, surface_occurrences, Address, Formula, Letter};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualState {
    pub formula: Formula,
    /// Moves made inside general and hybrid quasiatoms, with the address
    /// stripped and labels as in the whole run.
    pub stored: BTreeMap<Address, Run>,
}

impl fmt::Display for ResidualState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.formula)?;
        for (a, r) in &self.stored {
            write!(f, "; {}{}", if a.is_root() { "ε" } else { "" }, a)?;
            write!(f, " {}", super::show_run(r))?;
        }
        Ok(())
    }
}

fn illegal(m: &LabMove, reason: impl Into<String>) -> GameError {
    GameError::Illegal { index: 0, mv: m.to_string(), reason: reason.into() }
}

fn is_play_atom(q: &Formula) -> bool {
    matches!(q, Formula::Atom(a) if matches!(a.letter, Letter::General(_) | Letter::Hybrid { .. }))
}

impl ResidualState {
    pub fn new(f: Formula) -> ResidualState {
        ResidualState { formula: f, stored: BTreeMap::new() }
    }

    /// The stored play as one run over the current formula.
    pub fn stored_run(&self) -> Run {
        self.stored.iter().flat_map(|(a, r)| prefix_run(r, a)).collect()
    }

    /// Make one move. On failure the state is unchanged.
    pub fn apply(&mut self, i: &Interpretation, m: &LabMove) -> Result<(), GameError> {
        let (addr, payload, pol) =
            parse_move(&self.formula, &m.mv).ok_or_else(|| illegal(m, "does not address a quasiatom"))?;
        let (q, _) = resolve(&self.formula, &addr).expect("parsed address");
        if let Some(p) = chooser(q) {
            let mover = if pol.is_positive() { p } else { p.flip() };
            if m.player != mover {
                return Err(illegal(m, format!("{} cannot move in {q}", m.player)));
            }
            let h = choose(q, payload, i.universe).ok_or_else(|| illegal(m, "no such component or constant"))?;
            self.formula = replace_at(&self.formula, &addr, &h).expect("resolved");
            return Ok(());
        }
        if !is_play_atom(q) {
            return Err(illegal(m, "elementary games have no legal moves"));
        }
        self.stored.entry(addr.clone()).or_default().push(LabMove::new(m.player, payload));
        if is_unilegal(&self.formula, i, &self.stored_run())? {
            Ok(())
        } else {
            let r = self.stored.get_mut(&addr).expect("just pushed");
            r.pop();
            if r.is_empty() {
                self.stored.remove(&addr);
            }
            Err(illegal(m, format!("illegal in the game at {}", if addr.is_root() { "ε".into() } else { addr.to_string() })))
        }
    }

    /// Who wins if play stops here.
    pub fn finalize(&self, i: &Interpretation) -> Result<Player, GameError> {
        winner(&self.formula, i, &self.stored_run())
    }

    /// Every legal move `player` has in this position.
    pub fn legal_moves(&self, i: &Interpretation, player: Player) -> Vec<String> {
        let mut out = Vec::new();
        for o in surface_occurrences(&self.formula) {
            let q = &o.quasiatom;
            let prefix = o.address.to_string();
            if let Some(p) = chooser(q) {
                let mover = if o.polarity.is_positive() { p } else { p.flip() };
                if mover != player {
                    continue;
                }
                match q {
                    Formula::ChoiceAnd(cs) | Formula::ChoiceOr(cs) => {
                        out.extend((1..=cs.len()).map(|k| format!("{prefix}{k}")))
                    }
                    _ => out.extend((0..i.universe).map(|c| format!("{prefix}{c}"))),
                }
                continue;
            }
            let Formula::Atom(a) = q else { continue };
            if !is_play_atom(q) {
                continue;
            }
            // Moves of one instance of the atom's game are the candidates;
            // the check below enforces legality for every instance.
            let Formula::Atom(inst) = close(&Formula::Atom(a.clone()), &Valuation::new()) else { unreachable!() };
            let Ok(body) = i.expand(&inst) else { continue };
            let signed = |r: &[LabMove]| if o.polarity.is_positive() { r.to_vec() } else { super::negate_run(r) };
            let inner_player = if o.polarity.is_positive() { player } else { player.flip() };
            let Ok(inner) = residual(&body, i, &signed(self.stored.get(&o.address).map_or(&[][..], |r| r))) else {
                continue;
            };
            for mv in inner.legal_moves(i, inner_player) {
                let full = format!("{prefix}{mv}");
                if self.clone().apply(i, &LabMove::new(player, full.clone())).is_ok() {
                    out.push(full);
                }
            }
        }
        out
    }
}

/// The position reached by playing `g` in `f`.
pub fn residual(f: &Formula, i: &Interpretation, g: &[LabMove]) -> Result<ResidualState, GameError> {
    if let Some(v) = f.free_variables().into_iter().next() {
        return Err(GameError::Open(v));
    }
    i.covers(f)?;
    let mut s = ResidualState::new(f.clone());
    for (k, m) in g.iter().enumerate() {
        s.apply(i, m).map_err(|e| match e {
            GameError::Illegal { mv, reason, .. } => GameError::Illegal { index: k, mv, reason },
            other => other,
        })?;
    }
    Ok(s)
}
