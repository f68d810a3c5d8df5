//! Replaying the machine's invariants over a transcript.
//!
//! At every checkpoint the position Ω must be manageable for the current
//! proof hyperformula E, and the real game after the moves made so far must
//! coincide with the game E denotes (closed by f, hybrids read as general
//! letters) after Ω.

use super::{PlayTranscript, Snapshot};
use crate::calculus::Proof;
use crate::games::{close, is_manageable, residual, Interpretation, LabMove, ResidualState, Violation};
use crate::syntax::parse_move;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Which {
    /// The snapshot's E is not the formula of its proof step.
    NotProofStep,
    /// f does not list exactly the free variables of E.
    Valuation,
    Manageability(Violation),
    Residual { real: String, machine: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimViolation {
    pub iteration: usize,
    pub inner: usize,
    pub which: Which,
}

impl fmt::Display for ClaimViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "iteration {}.{}: ", self.iteration, self.inner)?;
        match &self.which {
            Which::NotProofStep => write!(f, "E is not the formula of its proof step"),
            Which::Valuation => write!(f, "f does not match the free variables of E"),
            Which::Manageability(v) => write!(f, "{v}"),
            Which::Residual { real, machine } => write!(f, "real position {real} differs from {machine}"),
        }
    }
}

impl std::error::Error for ClaimViolation {}

/// The game E denotes after Ω, as the machine sees it.
fn machine_view(s: &Snapshot) -> ResidualState {
    let mut state = ResidualState::new(close(&s.e, &s.f).dehybridize());
    for m in &s.omega {
        if let Some((addr, payload, _)) = parse_move(&s.e, &m.mv) {
            state.stored.entry(addr).or_default().push(LabMove::new(m.player, payload));
        }
    }
    state
}

fn check(t: &PlayTranscript, p: &Proof, i: &Interpretation, s: &Snapshot) -> Result<(), Which> {
    if p.step(s.step).map(|st| &st.formula) != Some(&s.e) {
        return Err(Which::NotProofStep);
    }
    let free: BTreeSet<String> = s.e.free_variables().into_iter().collect();
    if s.f.keys().cloned().collect::<BTreeSet<_>>() != free {
        return Err(Which::Valuation);
    }
    is_manageable(&s.e, &s.omega).map_err(Which::Manageability)?;
    let machine = machine_view(s);
    let prefix = &t.final_run[..s.theta_len.min(t.final_run.len())];
    match residual(&t.game, i, prefix) {
        Ok(real) if real == machine => Ok(()),
        Ok(real) => Err(Which::Residual { real: real.to_string(), machine: machine.to_string() }),
        Err(e) => Err(Which::Residual { real: e.to_string(), machine: machine.to_string() }),
    }
}

/// Check every retained snapshot of `t`.
pub fn assert_claim1(t: &PlayTranscript, p: &Proof, i: &Interpretation) -> Result<(), ClaimViolation> {
    for s in &t.snapshots {
        check(t, p, i, s).map_err(|which| ClaimViolation { iteration: s.iteration, inner: s.inner, which })?;
    }
    Ok(())
}
