//! Proof search for CL4.
//!
//! For formulas without `∀`/`∃` the procedure is a decision procedure: a
//! formula is provable iff one of the four rules applies with provable
//! premises, and every premise has smaller aggregate complexity. Rules are
//! tried in the order A, B1, B2, C. With `extended` set, blind quantifiers
//! are admitted and stability goes through the budgeted first-order checker,
//! so a negative answer may degrade to `Unknown`.

mod canon;

use crate::calculus::{b2_term_allowed, premises_a, Proof, Rule, Step, System};
use crate::classical::{elementarize, fo_validity, tautology_qf, Budget, Verdict};
use crate::syntax::{
    fresh_elementary_letter, fresh_variable, replace_at, surface_occurrences, Address, Formula, Letter,
    Polarity, Term,
};
use std::collections::{HashMap, HashSet};
use std::rc::Rc;
use thiserror::Error;

pub(crate) use canon::canonical;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Provable(Proof),
    Unprovable,
    Unknown(String),
}

impl Decision {
    pub fn is_provable(&self) -> bool {
        matches!(self, Decision::Provable(_))
    }

    pub fn is_unprovable(&self) -> bool {
        matches!(self, Decision::Unprovable)
    }

    pub fn proof(&self) -> Option<&Proof> {
        match self {
            Decision::Provable(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error("formula contains blind quantifiers; use the extended procedure")]
    BlindQuantifiers,
    #[error("formula contains hybrid letters")]
    Hybrids,
}

#[derive(Clone, Debug)]
pub struct DecideOptions {
    /// Admit `∀`/`∃` and use the budgeted classical checker.
    pub extended: bool,
    pub budget: Budget,
    /// Total first-order stability checks allowed in one extended run.
    pub max_stability_checks: usize,
    /// Share results between branches: refutations modulo renaming, proofs
    /// by exact formula. Faster, but gives up the polynomial-space discipline.
    pub memo: bool,
    pub trace: bool,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            extended: false,
            budget: Budget::default(),
            max_stability_checks: 20_000,
            memo: false,
            trace: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DecideStats {
    /// Search nodes visited.
    pub nodes: usize,
    /// Deepest recursion level reached (the root is level 1).
    pub max_depth: usize,
    /// `aggregate_complexity(f) + 1`; `max_depth` never exceeds it.
    pub depth_bound: usize,
    /// Rule C premise candidates examined.
    pub c_attempts: usize,
    /// First-order stability checks performed (extended mode).
    pub stability_checks: usize,
    pub memo_hits: usize,
}

#[derive(Clone, Debug)]
pub struct DecideReport {
    pub decision: Decision,
    pub stats: DecideStats,
    pub trace: Vec<String>,
}

struct Node {
    formula: Formula,
    rule: Rule,
    premises: Vec<Rc<Node>>,
}

enum Outcome {
    Proved(Rc<Node>),
    Refuted,
    Unknown(String),
}

struct Search<'o> {
    opts: &'o DecideOptions,
    stats: DecideStats,
    trace: Vec<String>,
    refuted: HashSet<Formula>,
    proved: HashMap<Formula, Rc<Node>>,
}

impl Search<'_> {
    /// Exact for quantifier-free elementarizations; budgeted otherwise.
    fn stable(&mut self, e: &Formula) -> Result<bool, String> {
        let el = elementarize(e);
        if !el.has_quantifiers() {
            return Ok(tautology_qf(&el).expect("quantifier-free elementary"));
        }
        self.stats.stability_checks += 1;
        if self.stats.stability_checks > self.opts.max_stability_checks {
            return Err("global stability-check budget exhausted".into());
        }
        match fo_validity(&el, &self.opts.budget) {
            Verdict::Valid => Ok(true),
            Verdict::Invalid(_) => Ok(false),
            Verdict::Unknown(why) => Err(why),
        }
    }

    fn search(&mut self, e: &Formula, depth: usize) -> Outcome {
        self.stats.nodes += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);
        assert!(
            depth <= self.stats.depth_bound,
            "recursion depth {depth} exceeds aggregate complexity bound {}",
            self.stats.depth_bound
        );
        let key = self.opts.memo.then(|| canonical(e));
        if let Some(k) = &key {
            if let Some(n) = self.proved.get(e) {
                self.stats.memo_hits += 1;
                return Outcome::Proved(n.clone());
            }
            if self.refuted.contains(k) {
                self.stats.memo_hits += 1;
                return Outcome::Refuted;
            }
        }
        let slot = self.trace.len();
        if self.opts.trace {
            self.trace.push(String::new());
        }
        let out = self.try_rules(e, depth);
        if self.opts.trace {
            let verdict = match &out {
                Outcome::Proved(n) => format!("provable by {}", n.rule.tag()),
                Outcome::Refuted => "unprovable".to_string(),
                Outcome::Unknown(_) => "unknown".to_string(),
            };
            self.trace[slot] = format!("{:w$}{e}  [{verdict}]", "", w = 2 * (depth - 1));
        }
        if let Some(k) = key {
            match &out {
                Outcome::Proved(n) => {
                    self.proved.insert(e.clone(), n.clone());
                }
                Outcome::Refuted => {
                    self.refuted.insert(k);
                }
                Outcome::Unknown(_) => {}
            }
        }
        out
    }

    fn try_rules(&mut self, e: &Formula, depth: usize) -> Outcome {
        let mut unknown: Option<String> = None;
        let leaf = |rule: Rule, premises: Vec<Rc<Node>>| {
            Outcome::Proved(Rc::new(Node { formula: e.clone(), rule, premises }))
        };

        match self.stable(e) {
            Ok(true) => {
                let mut nodes = Vec::new();
                let mut pending: Option<String> = None;
                let mut refuted = false;
                for h in premises_a(e) {
                    match self.search(&h, depth + 1) {
                        Outcome::Proved(n) => nodes.push(n),
                        Outcome::Refuted => {
                            refuted = true;
                            break;
                        }
                        Outcome::Unknown(why) => {
                            pending.get_or_insert(why);
                        }
                    }
                }
                if !refuted {
                    match pending {
                        None => return leaf(Rule::A, nodes),
                        Some(why) => {
                            unknown.get_or_insert(why);
                        }
                    }
                }
            }
            Ok(false) => {}
            Err(why) => {
                unknown.get_or_insert(why);
            }
        }

        let occs = surface_occurrences(e);
        // B1
        for occ in &occs {
            let cs = match (&occ.quasiatom, occ.polarity) {
                (Formula::ChoiceAnd(cs), Polarity::Negative) | (Formula::ChoiceOr(cs), Polarity::Positive) => cs,
                _ => continue,
            };
            for (i, g) in cs.iter().enumerate() {
                let h = replace_at(e, &occ.address, g).expect("surface address");
                match self.search(&h, depth + 1) {
                    Outcome::Proved(n) => {
                        return leaf(Rule::B1 { addr: occ.address.clone(), index: i + 1 }, vec![n])
                    }
                    Outcome::Refuted => {}
                    Outcome::Unknown(why) => {
                        unknown.get_or_insert(why);
                    }
                }
            }
        }
        // B2
        let mut terms = e.free_terms();
        for c in e.constants() {
            if !terms.contains(&Term::Const(c)) {
                terms.push(Term::Const(c));
            }
        }
        terms.push(Term::Var(fresh_variable(&e.all_variables())));
        for occ in &occs {
            let (x, g) = match (&occ.quasiatom, occ.polarity) {
                (Formula::ChoiceForall(x, g), Polarity::Negative)
                | (Formula::ChoiceExists(x, g), Polarity::Positive) => (x, g),
                _ => continue,
            };
            for t in &terms {
                if !b2_term_allowed(e, &occ.address, t) {
                    continue;
                }
                let h = replace_at(e, &occ.address, &g.substitute(x, t)).expect("surface address");
                match self.search(&h, depth + 1) {
                    Outcome::Proved(n) => {
                        return leaf(Rule::B2 { addr: occ.address.clone(), term: t.clone() }, vec![n])
                    }
                    Outcome::Refuted => {}
                    Outcome::Unknown(why) => {
                        unknown.get_or_insert(why);
                    }
                }
            }
        }
        // C
        let general = |pol: Polarity| -> Vec<(Address, String, Vec<Term>)> {
            occs.iter()
                .filter(|o| o.polarity == pol)
                .filter_map(|o| match &o.quasiatom {
                    Formula::Atom(a) => match &a.letter {
                        Letter::General(n) => Some((o.address.clone(), n.clone(), a.args.clone())),
                        _ => None,
                    },
                    _ => None,
                })
                .collect()
        };
        let positives = general(Polarity::Positive);
        let negatives = general(Polarity::Negative);
        if !positives.is_empty() && !negatives.is_empty() {
            let q = fresh_elementary_letter(&e.letter_names());
            for (pa, pn, pargs) in &positives {
                for (na, nn, nargs) in &negatives {
                    if pn != nn || pargs.len() != nargs.len() {
                        continue;
                    }
                    self.stats.c_attempts += 1;
                    let atom = |args: &Vec<Term>| Formula::atom(Letter::Elementary(q.clone()), args.clone());
                    let h1 = replace_at(e, pa, &atom(pargs)).expect("surface address");
                    let h = replace_at(&h1, na, &atom(nargs)).expect("surface address");
                    match self.search(&h, depth + 1) {
                        Outcome::Proved(n) => {
                            return leaf(Rule::C { pos: pa.clone(), neg: na.clone(), elem: q.clone() }, vec![n])
                        }
                        Outcome::Refuted => {}
                        Outcome::Unknown(why) => {
                            unknown.get_or_insert(why);
                        }
                    }
                }
            }
        }
        match unknown {
            Some(why) => Outcome::Unknown(why),
            None => Outcome::Refuted,
        }
    }
}

/// Post-order listing with one step per distinct formula.
fn linearize(root: &Rc<Node>) -> Proof {
    fn go(n: &Rc<Node>, ids: &mut HashMap<Formula, usize>, steps: &mut Vec<Step>) -> usize {
        if let Some(&id) = ids.get(&n.formula) {
            return id;
        }
        let premises = n.premises.iter().map(|p| go(p, ids, steps)).collect();
        let id = steps.len() + 1;
        steps.push(Step { id, formula: n.formula.clone(), rule: n.rule.clone(), premises });
        ids.insert(n.formula.clone(), id);
        id
    }
    let mut steps = Vec::new();
    go(root, &mut HashMap::new(), &mut steps);
    Proof { system: System::Cl4, steps }
}

/// Run the search with explicit options.
pub fn decide(f: &Formula, opts: &DecideOptions) -> Result<DecideReport, DecideError> {
    if f.has_hybrids() {
        return Err(DecideError::Hybrids);
    }
    if !opts.extended && f.has_blind_quantifiers() {
        return Err(DecideError::BlindQuantifiers);
    }
    // Deep formulas recurse deeply; give the search its own generous stack.
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(256 << 20)
            .spawn_scoped(s, || {
                let mut search = Search {
                    opts,
                    stats: DecideStats { depth_bound: f.aggregate_complexity() + 1, ..Default::default() },
                    trace: Vec::new(),
                    refuted: HashSet::new(),
                    proved: HashMap::new(),
                };
                let decision = match search.search(f, 1) {
                    Outcome::Proved(n) => Decision::Provable(linearize(&n)),
                    Outcome::Refuted => Decision::Unprovable,
                    Outcome::Unknown(why) => Decision::Unknown(why),
                };
                Ok(DecideReport { decision, stats: search.stats, trace: search.trace })
            })
            .expect("spawn search thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}

/// The certified procedure for formulas without blind quantifiers.
pub fn decide_blindfree(f: &Formula) -> Result<Decision, DecideError> {
    decide(f, &DecideOptions::default()).map(|r| r.decision)
}

/// Best-effort search admitting `∀`/`∃`; negative answers may be `Unknown`.
pub fn decide_extended(f: &Formula, budget: &Budget) -> Result<Decision, DecideError> {
    let opts = DecideOptions { extended: true, budget: *budget, ..Default::default() };
    decide(f, &opts).map(|r| r.decision)
}
