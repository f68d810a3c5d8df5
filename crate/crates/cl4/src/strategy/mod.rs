//! Strategies extracted from reasonable CL4° proofs.
//!
//! The machine walks the proof from the conclusion towards the axioms. At a
//! B1, B2 or C° step it moves on its own and passes to the premise; at a
//! Rule A step it waits for the environment, mirrors moves made in hybrid
//! atoms and follows the environment's choices to the matching premise.
//!
//! Play is resumable: a [`Session`] is cloned to branch on the environment's
//! next move, which is how the exhaustive tests enumerate environments.

mod claim;
mod transcript;

use crate::calculus::{make_reasonable, to_cl4o, Proof, Rule, Step, System, TransformError};
use crate::games::{close, parse_index, residual, GameError, Interpretation, LabMove, Player, ResidualState, Run, Valuation};
use crate::syntax::{
    fresh_variable, is_reasonable, match_except_at, parse_move, replace_at, resolve, surface_occurrences, Address,
    Formula, Letter, Polarity, Reasonableness, Term,
};
use thiserror::Error;

pub use claim::{assert_claim1, ClaimViolation, Which};
pub use transcript::{parse_script, EnvEvent, EnvironmentScript};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("expected a CL4o proof")]
    WrongSystem,
    #[error("proof has no steps")]
    Empty,
    #[error("step {0} is not reasonable")]
    Unreasonable(usize),
    #[error("the conclusion has blind quantifiers; enable the non-certified mode to play it")]
    BlindQuantifiers,
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    MachineWins,
    /// The play ended legally and the machine lost. Never happens for a
    /// sound strategy; kept so that a failure is reported rather than hidden.
    EnvironmentWins,
    /// The environment made an illegal move, which loses it the play.
    EnvironmentIllegal { mv: String, reason: String },
    Aborted(String),
}

impl Verdict {
    pub fn machine_won(&self) -> bool {
        matches!(self, Verdict::MachineWins | Verdict::EnvironmentIllegal { .. })
    }
}

/// What the engine did in one step of play.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Case {
    B1,
    B2,
    CHybrid,
    /// Subcases of the Rule A loop: 1 general atom, 2 hybrid atom (mirrored),
    /// 3 choice of a component, 4 choice of a constant.
    A(u8),
}

impl Case {
    pub fn label(&self) -> String {
        match self {
            Case::B1 => "B1".into(),
            Case::B2 => "B2".into(),
            Case::CHybrid => "Co".into(),
            Case::A(n) => format!("A({})", ["i", "ii", "iii", "iv"][usize::from(*n) - 1]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    /// Main-loop iteration, from 1.
    pub iteration: usize,
    pub step: usize,
    pub case: Case,
    pub moves: Run,
}

/// The machine's records at a checkpoint: at the start of a main-loop
/// iteration (`inner` = 0) or after the `inner`-th environment move inside a
/// Rule A iteration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapshot {
    pub iteration: usize,
    pub inner: usize,
    pub step: usize,
    pub e: Formula,
    pub f: Valuation,
    pub omega: Run,
    pub theta_len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlayTranscript {
    /// The game played: the conclusion closed under the initial valuation.
    pub game: Formula,
    pub final_run: Run,
    pub events: Vec<Event>,
    pub snapshots: Vec<Snapshot>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug)]
pub struct PlayOptions {
    pub max_steps: usize,
    pub snapshots: bool,
    /// Admit blind quantifiers in the conclusion. Winners are then computed
    /// over the finite universe, so a win is not a certificate.
    pub allow_blind: bool,
    pub valuation: Valuation,
}

impl Default for PlayOptions {
    fn default() -> PlayOptions {
        PlayOptions { max_steps: 10_000, snapshots: true, allow_blind: false, valuation: Valuation::new() }
    }
}

/// A play in progress. Between calls it is always waiting for the
/// environment in a Rule A iteration, or finished.
#[derive(Clone, Debug)]
pub struct Session<'a> {
    proof: &'a Proof,
    interp: &'a Interpretation,
    max_steps: usize,
    keep_snapshots: bool,
    step: usize,
    e: Formula,
    f: Valuation,
    omega: Run,
    theta: Run,
    /// The position of the real game after `theta`.
    game: ResidualState,
    start: Formula,
    iteration: usize,
    inner: usize,
    steps: usize,
    events: Vec<Event>,
    snapshots: Vec<Snapshot>,
    verdict: Option<Verdict>,
}

impl<'a> Session<'a> {
    pub fn start(proof: &'a Proof, interp: &'a Interpretation, opts: &PlayOptions) -> Result<Session<'a>, StrategyError> {
        if proof.system != System::Cl4o {
            return Err(StrategyError::WrongSystem);
        }
        let last = proof.steps.last().ok_or(StrategyError::Empty)?;
        for s in &proof.steps {
            if is_reasonable(&s.formula) != Reasonableness::Reasonable {
                return Err(StrategyError::Unreasonable(s.id));
            }
        }
        let conclusion = &last.formula;
        if conclusion.has_blind_quantifiers() && !opts.allow_blind {
            return Err(StrategyError::BlindQuantifiers);
        }
        let f: Valuation = conclusion
            .free_variables()
            .into_iter()
            .map(|x| {
                let c = opts.valuation.get(&x).copied().unwrap_or(0);
                (x, c)
            })
            .collect();
        let game_formula = close(conclusion, &f);
        let game = residual(&game_formula, interp, &[])?;
        let mut s = Session {
            proof,
            interp,
            max_steps: opts.max_steps,
            keep_snapshots: opts.snapshots,
            step: last.id,
            e: conclusion.clone(),
            f,
            omega: Vec::new(),
            theta: Vec::new(),
            game,
            start: game_formula,
            iteration: 0,
            inner: 0,
            steps: 0,
            events: Vec::new(),
            snapshots: Vec::new(),
            verdict: None,
        };
        s.main_loop();
        Ok(s)
    }

    pub fn is_finished(&self) -> bool {
        self.verdict.is_some()
    }

    /// The current proof hyperformula.
    pub fn current(&self) -> &Formula {
        &self.e
    }

    pub fn run(&self) -> &Run {
        &self.theta
    }

    /// The environment's legal moves in the current position.
    pub fn environment_moves(&self) -> Vec<String> {
        if self.is_finished() {
            return Vec::new();
        }
        self.game.legal_moves(self.interp, Player::Bottom)
    }

    fn proof_step(&self, id: usize) -> Option<&'a Step> {
        self.proof.step(id)
    }

    fn abort(&mut self, why: impl Into<String>) {
        self.verdict = Some(Verdict::Aborted(why.into()));
    }

    fn snapshot(&mut self) {
        if self.keep_snapshots {
            self.snapshots.push(Snapshot {
                iteration: self.iteration,
                inner: self.inner,
                step: self.step,
                e: self.e.clone(),
                f: self.f.clone(),
                omega: self.omega.clone(),
                theta_len: self.theta.len(),
            });
        }
    }

    /// Make a machine move in the real game.
    fn emit(&mut self, mv: String) -> Result<LabMove, String> {
        let m = LabMove::top(mv);
        self.game.apply(self.interp, &m).map_err(|e| format!("machine move rejected: {e}"))?;
        self.theta.push(m.clone());
        Ok(m)
    }

    fn retain_free(&mut self, h: &Formula) {
        let free = h.free_variables();
        self.f.retain(|z, _| free.contains(z));
    }

    fn premise(&self, s: &Step) -> Option<&'a Step> {
        match s.premises.as_slice() {
            [q] => self.proof_step(*q),
            _ => None,
        }
    }

    /// Run main-loop iterations until a Rule A step needs the environment.
    fn main_loop(&mut self) {
        loop {
            if self.verdict.is_some() {
                return;
            }
            self.steps += 1;
            if self.steps > self.max_steps {
                return self.abort("step limit reached");
            }
            self.iteration += 1;
            self.inner = 0;
            self.snapshot();
            let Some(s) = self.proof_step(self.step) else {
                return self.abort(format!("step {} is missing", self.step));
            };
            if let Rule::A = s.rule {
                return;
            }
            let Some(h) = self.premise(s) else {
                return self.abort(format!("step {} has no usable premise", s.id));
            };
            let result = match &s.rule {
                Rule::B1 { addr, index } => self.case_b1(s, h, addr, *index),
                Rule::B2 { addr, term } => self.case_b2(s, h, addr, term),
                Rule::CHybrid { general, elementary } => self.case_co(s, h, general, elementary),
                Rule::C { .. } => Err("rule C cannot occur in a CL4o proof".into()),
                Rule::A => unreachable!(),
            };
            match result {
                Ok(()) => {
                    self.step = h.id;
                    self.e = h.formula.clone();
                }
                Err(why) => return self.abort(why),
            }
        }
    }

    fn case_b1(&mut self, s: &Step, h: &Step, addr: &Address, index: usize) -> Result<(), String> {
        let m = self.emit(format!("{addr}{index}"))?;
        self.retain_free(&h.formula);
        self.events.push(Event { iteration: self.iteration, step: s.id, case: Case::B1, moves: vec![m] });
        Ok(())
    }

    fn case_b2(&mut self, s: &Step, h: &Step, addr: &Address, t: &Term) -> Result<(), String> {
        let c = match t {
            Term::Const(c) => *c,
            Term::Var(v) => self.f.get(v).copied().unwrap_or(0),
        };
        let m = self.emit(format!("{addr}{c}"))?;
        self.retain_free(&h.formula);
        if let Term::Var(v) = t {
            if h.formula.free_variables().contains(v) {
                self.f.insert(v.clone(), c);
            }
        }
        self.events.push(Event { iteration: self.iteration, step: s.id, case: Case::B2, moves: vec![m] });
        Ok(())
    }

    fn case_co(&mut self, s: &Step, h: &Step, general: &str, elementary: &str) -> Result<(), String> {
        let mut pi = None;
        let mut nu = None;
        for o in surface_occurrences(&h.formula) {
            if let Formula::Atom(a) = &o.quasiatom {
                if matches!(&a.letter, Letter::Hybrid { general: g, elementary: q } if g == general && q == elementary) {
                    match o.polarity {
                        Polarity::Positive => pi = Some(o.address),
                        Polarity::Negative => nu = Some(o.address),
                    }
                }
            }
        }
        let (Some(pi), Some(nu)) = (pi, nu) else {
            return Err(format!("step {}: the premise lacks a matched pair {general}#{elementary}", s.id));
        };
        let strip = |a: &Address| -> Vec<String> {
            let prefix = a.to_string();
            self.omega.iter().filter_map(|m| m.mv.strip_prefix(prefix.as_str()).map(str::to_string)).collect()
        };
        let (pi_moves, nu_moves) = (strip(&pi), strip(&nu));
        let mut moves = Vec::new();
        for b in nu_moves {
            moves.push(self.emit(format!("{pi}{b}"))?);
        }
        for b in pi_moves {
            moves.push(self.emit(format!("{nu}{b}"))?);
        }
        self.omega.extend(moves.iter().cloned());
        self.events.push(Event { iteration: self.iteration, step: s.id, case: Case::CHybrid, moves });
        Ok(())
    }

    /// Feed one environment move.
    pub fn env_move(&mut self, mv: &str) {
        if self.is_finished() {
            return;
        }
        self.steps += 1;
        if self.steps > self.max_steps {
            return self.abort("step limit reached");
        }
        let m = LabMove::bottom(mv);
        if let Err(e) = self.game.apply(self.interp, &m) {
            let reason = match e {
                GameError::Illegal { reason, .. } => reason,
                other => other.to_string(),
            };
            self.verdict = Some(Verdict::EnvironmentIllegal { mv: mv.to_string(), reason });
            return;
        }
        self.theta.push(m.clone());
        match self.rule_a(m) {
            Ok(true) => self.main_loop(),
            Ok(false) => {}
            Err(why) => self.abort(why),
        }
    }

    /// One pass of the Rule A loop on the environment move `m`. True when
    /// the loop hands over to a premise.
    fn rule_a(&mut self, m: LabMove) -> Result<bool, String> {
        let s = self.proof_step(self.step).ok_or("current step is missing")?;
        let (gamma, payload, pol) = parse_move(&self.e, &m.mv).ok_or("move fits no subcase")?;
        let (q, _) = resolve(&self.e, &gamma).expect("parsed address");
        let iteration = self.iteration;
        let event = |case, moves| Event { iteration, step: s.id, case, moves };
        match q {
            Formula::Atom(a) if matches!(a.letter, Letter::General(_)) => {
                self.omega.push(m.clone());
                self.events.push(event(Case::A(1), vec![m]));
                self.inner += 1;
                self.snapshot();
                Ok(false)
            }
            Formula::Atom(a) if a.letter.is_hybrid() => {
                let sigma = surface_occurrences(&self.e)
                    .into_iter()
                    .find(|o| o.address != gamma && matches!(&o.quasiatom, Formula::Atom(b) if b.letter == a.letter))
                    .ok_or("hybrid atom without a partner")?
                    .address;
                let reply = self.emit(format!("{sigma}{payload}"))?;
                self.omega.push(m.clone());
                self.omega.push(reply.clone());
                self.events.push(event(Case::A(2), vec![m, reply]));
                self.inner += 1;
                self.snapshot();
                Ok(false)
            }
            Formula::ChoiceAnd(cs) | Formula::ChoiceOr(cs)
                if matches!(q, Formula::ChoiceAnd(_)) == pol.is_positive() =>
            {
                let i = parse_index(payload, cs.len()).ok_or("no such component")?;
                let h = replace_at(&self.e, &gamma, &cs[i - 1]).expect("resolved");
                let next = s
                    .premises
                    .iter()
                    .filter_map(|&p| self.proof_step(p))
                    .find(|p| p.formula == h)
                    .ok_or_else(|| format!("step {}: no premise for component {i} at {gamma}", s.id))?;
                self.retain_free(&h);
                self.events.push(event(Case::A(3), vec![m]));
                self.step = next.id;
                self.e = h;
                Ok(true)
            }
            Formula::ChoiceForall(x, g) | Formula::ChoiceExists(x, g)
                if matches!(q, Formula::ChoiceForall(..)) == pol.is_positive() =>
            {
                let c: u64 = payload.parse().map_err(|_| "not a constant")?;
                let used = self.e.all_variables();
                let found = s.premises.iter().filter_map(|&p| self.proof_step(p)).find_map(|p| {
                    let sub = match_except_at(&self.e, &p.formula, &gamma)?;
                    let mut ys: Vec<String> = sub.free_variables().into_iter().filter(|y| !used.contains(y)).collect();
                    ys.push(fresh_variable(&used));
                    ys.into_iter().find(|y| g.substitute(x, &Term::Var(y.clone())) == *sub).map(|y| (p, y))
                });
                let (next, y) = found.ok_or_else(|| format!("step {}: no premise instantiating {gamma}", s.id))?;
                if next.formula.free_variables().contains(&y) {
                    self.f.insert(y, c);
                }
                self.events.push(event(Case::A(4), vec![m]));
                self.step = next.id;
                self.e = next.formula.clone();
                Ok(true)
            }
            _ => Err(format!("legal move {} fits no subcase", m.mv)),
        }
    }

    /// End the play: the environment passes from now on.
    pub fn finish(mut self) -> PlayTranscript {
        if self.verdict.is_none() {
            self.verdict = Some(match self.game.finalize(self.interp) {
                Ok(Player::Top) => Verdict::MachineWins,
                Ok(Player::Bottom) => Verdict::EnvironmentWins,
                Err(e) => Verdict::Aborted(format!("final position: {e}")),
            });
        }
        PlayTranscript {
            game: self.start,
            final_run: self.theta,
            events: self.events,
            snapshots: self.snapshots,
            verdict: self.verdict.expect("set above"),
        }
    }
}

/// Bring a proof into the form the engine plays: CL4 proofs are converted
/// to CL4°, and every CL4° proof is made reasonable.
pub fn prepare(p: &Proof) -> Result<Proof, TransformError> {
    match p.system {
        System::Cl4 => make_reasonable(&to_cl4o(p)?),
        System::Cl4o => make_reasonable(p),
    }
}

/// Play the strategy extracted from `p` against a scripted environment.
pub fn extract_and_play(
    p: &Proof,
    interp: &Interpretation,
    env: &EnvironmentScript,
    opts: &PlayOptions,
) -> Result<PlayTranscript, StrategyError> {
    let mut s = Session::start(p, interp, opts)?;
    for ev in env {
        if s.is_finished() {
            break;
        }
        match ev {
            EnvEvent::Move(mv) => s.env_move(mv),
            EnvEvent::Pass => break,
        }
    }
    Ok(s.finish())
}
