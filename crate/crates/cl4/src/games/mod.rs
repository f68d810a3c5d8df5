//! Formula-shaped games over a finite universe: runs and their projections,
//! ⊤-delays, manageability, legality, winners and residual positions.
//!
//! A move is a string. Addresses in front of it are consumed at parallel
//! nodes (`∧`, `∨`, `→`) as `i.` tokens; the rest is the payload played in the
//! quasiatom reached. A choice move is a bare component index or constant;
//! once made, later moves in the chosen component carry no extra prefix.

mod eval;
mod interp;
mod residual;

use crate::syntax::{parse_move, resolve, surface_occurrences, Address, Formula, Letter, Polarity};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

pub use eval::{is_unilegal, winner};
pub(crate) use eval::parse_index;
pub use interp::{close, Definition, Interpretation, Valuation};
pub use residual::{residual, ResidualState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    #[serde(rename = "T")]
    Top,
    #[serde(rename = "B")]
    Bottom,
}

impl Player {
    pub fn flip(self) -> Player {
        match self {
            Player::Top => Player::Bottom,
            Player::Bottom => Player::Top,
        }
    }

    fn from_bool(b: bool) -> Player {
        if b {
            Player::Top
        } else {
            Player::Bottom
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Top => "⊤",
            Player::Bottom => "⊥",
        })
    }
}

/// A labeled move.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabMove {
    pub player: Player,
    #[serde(rename = "move")]
    pub mv: String,
}

impl LabMove {
    pub fn new(player: Player, mv: impl Into<String>) -> LabMove {
        LabMove { player, mv: mv.into() }
    }

    pub fn top(mv: impl Into<String>) -> LabMove {
        LabMove::new(Player::Top, mv)
    }

    pub fn bottom(mv: impl Into<String>) -> LabMove {
        LabMove::new(Player::Bottom, mv)
    }
}

impl fmt::Display for LabMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.player, self.mv)
    }
}

pub type Run = Vec<LabMove>;

pub fn show_run(g: &[LabMove]) -> String {
    let parts: Vec<String> = g.iter().map(|m| m.to_string()).collect();
    format!("⟨{}⟩", parts.join(", "))
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("illegal move {index} ({mv}): {reason}")]
    Illegal { index: usize, mv: String, reason: String },
    #[error("letter {0} is not interpreted")]
    Undefined(String),
    #[error("formula is not closed: free variable {0}")]
    Open(String),
    #[error("bad interpretation: {0}")]
    BadInterpretation(String),
    #[error("address {0} does not resolve")]
    Unresolved(Address),
}

pub fn negate_run(g: &[LabMove]) -> Run {
    g.iter().map(|m| LabMove::new(m.player.flip(), m.mv.clone())).collect()
}

/// How [`project`] treats the moves under an address.
#[derive(Clone, Copy, Debug)]
pub enum Projection<'a> {
    /// Γ^γ: keep the moves under γ, with γ stripped.
    Raw,
    /// Γ^{−γ}: drop the moves under γ.
    Delete,
    /// Γ_E^γ: as raw, negated when the quasiatom at γ is negative in E.
    Signed(&'a Formula),
}

pub fn project(g: &[LabMove], addr: &Address, mode: Projection<'_>) -> Result<Run, GameError> {
    let prefix = addr.to_string();
    let raw = || -> Run {
        g.iter()
            .filter_map(|m| m.mv.strip_prefix(prefix.as_str()).map(|rest| LabMove::new(m.player, rest)))
            .collect()
    };
    match mode {
        Projection::Raw => Ok(raw()),
        Projection::Delete => Ok(g.iter().filter(|m| !m.mv.starts_with(prefix.as_str())).cloned().collect()),
        Projection::Signed(e) => match resolve(e, addr) {
            Some((_, Polarity::Positive)) => Ok(raw()),
            Some((_, Polarity::Negative)) => Ok(negate_run(&raw())),
            None => Err(GameError::Unresolved(addr.clone())),
        },
    }
}

/// Put `addr` in front of every move.
pub fn prefix_run(g: &[LabMove], addr: &Address) -> Run {
    let prefix = addr.to_string();
    g.iter().map(|m| LabMove::new(m.player, format!("{prefix}{}", m.mv))).collect()
}

fn moves_of(g: &[LabMove], p: Player) -> Vec<&str> {
    g.iter().filter(|m| m.player == p).map(|m| m.mv.as_str()).collect()
}

/// For each ⊤-move in order, the number of ⊥-moves preceding it.
fn bottoms_before_tops(g: &[LabMove]) -> Vec<usize> {
    let mut seen = 0;
    let mut out = Vec::new();
    for m in g {
        match m.player {
            Player::Bottom => seen += 1,
            Player::Top => out.push(seen),
        }
    }
    out
}

/// Is `d` a ⊤-delay of `g`? Both players make the same moves in the same
/// order, and every ⊤-move of `d` comes no earlier, relative to the ⊥-moves,
/// than in `g`.
pub fn is_top_delay(d: &[LabMove], g: &[LabMove]) -> bool {
    moves_of(d, Player::Top) == moves_of(g, Player::Top)
        && moves_of(d, Player::Bottom) == moves_of(g, Player::Bottom)
        && bottoms_before_tops(d).iter().zip(bottoms_before_tops(g)).all(|(a, b)| *a >= b)
}

/// The first clause of manageability that fails, and where.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("manageability clause {clause} fails at {address}")]
pub struct Violation {
    pub clause: u8,
    pub address: Address,
}

/// Check the three manageability clauses of `g` against the hyperformula `e`.
pub fn is_manageable(e: &Formula, g: &[LabMove]) -> Result<(), Violation> {
    for m in g {
        match parse_move(e, &m.mv) {
            Some((addr, _, _)) => {
                let (q, _) = resolve(e, &addr).expect("parsed address");
                let ok = matches!(q, Formula::Atom(a) if matches!(a.letter, Letter::General(_) | Letter::Hybrid { .. }));
                if !ok {
                    return Err(Violation { clause: 1, address: addr });
                }
            }
            None => return Err(Violation { clause: 1, address: Address::root() }),
        }
    }
    let occs = surface_occurrences(e);
    let mut hybrids: BTreeMap<(String, String, usize), (Vec<Address>, Vec<Address>)> = BTreeMap::new();
    for o in &occs {
        let Formula::Atom(a) = &o.quasiatom else { continue };
        match &a.letter {
            Letter::Hybrid { general, elementary } => {
                let entry = hybrids.entry((general.clone(), elementary.clone(), a.arity())).or_default();
                if o.polarity.is_positive() {
                    entry.0.push(o.address.clone());
                } else {
                    entry.1.push(o.address.clone());
                }
            }
            Letter::General(_) => {
                let sub = project(g, &o.address, Projection::Raw).expect("raw");
                if sub.iter().any(|m| m.player == Player::Top) {
                    return Err(Violation { clause: 3, address: o.address.clone() });
                }
            }
            _ => {}
        }
    }
    for (pos, neg) in hybrids.values() {
        for pi in pos {
            for nu in neg {
                let gp = project(g, pi, Projection::Raw).expect("raw");
                let gn = negate_run(&project(g, nu, Projection::Raw).expect("raw"));
                if !is_top_delay(&gp, &gn) {
                    return Err(Violation { clause: 2, address: pi.clone() });
                }
            }
        }
    }
    Ok(())
}
