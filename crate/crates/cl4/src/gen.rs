//! Seeded random generators for tests and the command line.
//!
//! Everything here draws from a caller-supplied RNG, so a fixed seed gives a
//! fixed stream of formulas, interpretations and runs.

use crate::games::{Interpretation, LabMove, Player, ResidualState, Run};
use crate::syntax::{Formula, Letter, Term};
use crate::translate::Signature;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// What random formulas may contain.
#[derive(Clone, Debug)]
pub struct Shape {
    pub depth: usize,
    pub general: Vec<(String, usize)>,
    pub elementary: Vec<(String, usize)>,
    pub choice: bool,
    pub quantifiers: bool,
    pub blind: bool,
    /// Constants used as atom arguments are below this bound.
    pub universe: u64,
}

impl Default for Shape {
    fn default() -> Shape {
        Shape {
            depth: 3,
            general: vec![("P".into(), 0), ("Q".into(), 1)],
            elementary: vec![("p".into(), 0), ("r".into(), 1)],
            choice: true,
            quantifiers: true,
            blind: false,
            universe: 2,
        }
    }
}

const BOUND: [&str; 3] = ["x", "y", "z"];

fn atom(rng: &mut impl Rng, letter: Letter, arity: usize, bound: &[String], universe: u64) -> Formula {
    let args = (0..arity)
        .map(|_| match bound.choose(rng) {
            Some(v) if rng.gen_bool(0.7) => Term::Var(v.clone()),
            _ => Term::Const(rng.gen_range(0..universe.max(1))),
        })
        .collect();
    Formula::atom(letter, args)
}

fn leaf(rng: &mut impl Rng, s: &Shape, bound: &[String]) -> Formula {
    let n = s.general.len() + s.elementary.len();
    if n == 0 || rng.gen_ratio(1, 12) {
        return if rng.gen_bool(0.5) { Formula::top() } else { Formula::bottom() };
    }
    let k = rng.gen_range(0..n);
    if k < s.general.len() {
        let (name, ar) = &s.general[k];
        atom(rng, Letter::General(name.clone()), *ar, bound, s.universe)
    } else {
        let (name, ar) = &s.elementary[k - s.general.len()];
        atom(rng, Letter::Elementary(name.clone()), *ar, bound, s.universe)
    }
}

fn node(rng: &mut impl Rng, s: &Shape, depth: usize, bound: &mut Vec<String>) -> Formula {
    if depth == 0 || rng.gen_ratio(1, 4) {
        return leaf(rng, s, bound);
    }
    let mut ops = vec![0, 1, 2, 3];
    if s.choice {
        ops.extend([4, 5]);
    }
    if s.quantifiers && bound.len() < BOUND.len() {
        if s.choice {
            ops.extend([6, 7]);
        }
        if s.blind {
            ops.extend([8, 9]);
        }
    }
    let width = if rng.gen_ratio(1, 4) { 3 } else { 2 };
    let kids = |rng: &mut _, bound: &mut Vec<String>| (0..width).map(|_| node(rng, s, depth - 1, bound)).collect();
    match *ops.choose(rng).expect("nonempty") {
        0 => Formula::not(node(rng, s, depth - 1, bound)),
        1 => Formula::And(kids(rng, bound)),
        2 => Formula::Or(kids(rng, bound)),
        3 => Formula::implies(node(rng, s, depth - 1, bound), node(rng, s, depth - 1, bound)),
        4 => Formula::ChoiceAnd(kids(rng, bound)),
        5 => Formula::ChoiceOr(kids(rng, bound)),
        q => {
            let x = BOUND[bound.len()].to_string();
            bound.push(x.clone());
            let body = Box::new(node(rng, s, depth - 1, bound));
            bound.pop();
            match q {
                6 => Formula::ChoiceForall(x, body),
                7 => Formula::ChoiceExists(x, body),
                8 => Formula::Forall(x, body),
                _ => Formula::Exists(x, body),
            }
        }
    }
}

/// A closed formula of depth at most `s.depth`.
pub fn formula(rng: &mut impl Rng, s: &Shape) -> Formula {
    node(rng, s, s.depth, &mut Vec::new())
}

/// A formula whose free variables are among `free`, which must be drawn
/// from x, y, z in that order.
pub fn open_formula(rng: &mut impl Rng, s: &Shape, free: &[&str]) -> Formula {
    node(rng, s, s.depth, &mut free.iter().map(|v| v.to_string()).collect())
}

/// A quantifier-free elementary formula with between 1 and `max_atoms` atom
/// occurrences over the letters p, q, r, s.
pub fn qf_elementary(rng: &mut impl Rng, max_atoms: usize) -> Formula {
    fn build(rng: &mut impl Rng, n: usize) -> Formula {
        let f = if n == 1 {
            let name = ["p", "q", "r", "s"].choose(rng).expect("nonempty");
            Formula::elementary(name, vec![])
        } else {
            let k = rng.gen_range(1..n);
            let (a, b) = (build(rng, k), build(rng, n - k));
            match rng.gen_range(0..3) {
                0 => Formula::And(vec![a, b]),
                1 => Formula::Or(vec![a, b]),
                _ => Formula::implies(a, b),
            }
        };
        if rng.gen_ratio(1, 4) {
            Formula::not(f)
        } else {
            f
        }
    }
    let n = rng.gen_range(1..=max_atoms.max(1));
    build(rng, n)
}

/// An interpretation over `0..universe` that defines every general letter
/// of `f` (hybrids through their general component) by a small random body
/// with choice operators, and fills a random truth table for every ground
/// elementary atom in sight.
pub fn interpretation(rng: &mut impl Rng, f: &Formula, universe: u64) -> Interpretation {
    let mut i = Interpretation::new(universe);
    let mut letters: BTreeSet<(String, usize)> = f.general_letters().into_iter().collect();
    for h in f.hybrid_letters() {
        letters.insert((h.general.clone(), h.arity));
    }
    let mut elementary: BTreeSet<(String, usize)> = f.elementary_letter_names();
    for (name, arity) in letters {
        let params: Vec<String> = BOUND[..arity].iter().map(|s| s.to_string()).collect();
        let s = Shape {
            depth: 2,
            general: vec![],
            elementary: vec![("a".into(), 0), (format!("b{arity}"), arity), (format!("d{arity}"), arity)],
            choice: true,
            quantifiers: false,
            blind: false,
            universe,
        };
        let mut bound = params.clone();
        let mut body = node(rng, &s, 2, &mut bound);
        if !body.has_choice() && rng.gen_bool(0.7) {
            let other = leaf(rng, &s, &bound);
            body = if rng.gen_bool(0.5) { Formula::ChoiceAnd(vec![body, other]) } else { Formula::ChoiceOr(vec![body, other]) };
        }
        elementary.extend(body.elementary_letter_names());
        i.define_formula(&name, params, body).expect("generated bodies are admissible");
    }
    for (name, arity) in elementary {
        for tuple in tuples(arity, universe) {
            let atom = if arity == 0 {
                name.clone()
            } else {
                format!("{name}({})", tuple.iter().map(u64::to_string).collect::<Vec<_>>().join(", "))
            };
            i.set_atom(&atom, rng.gen_bool(0.5)).expect("well-formed ground atom");
        }
    }
    i
}

/// All `arity`-tuples over `0..universe`.
pub fn tuples(arity: usize, universe: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..arity {
        out = out.into_iter().flat_map(|t| (0..universe).map(move |c| [t.clone(), vec![c]].concat())).collect();
    }
    out
}

/// A random unilegal run of the closed formula `f` with at most `max_len`
/// moves. Play stops when neither player has a move, or earlier at random.
pub fn run(rng: &mut impl Rng, f: &Formula, i: &Interpretation, max_len: usize) -> Run {
    let mut state = ResidualState::new(f.clone());
    let mut out = Vec::new();
    for _ in 0..max_len {
        let first = if rng.gen_bool(0.5) { Player::Top } else { Player::Bottom };
        let Some((p, moves)) = [first, first.flip()]
            .into_iter()
            .map(|p| (p, state.legal_moves(i, p)))
            .find(|(_, ms)| !ms.is_empty())
        else {
            break;
        };
        let m = LabMove::new(p, moves.choose(rng).expect("nonempty").clone());
        state.apply(i, &m).expect("listed moves are legal");
        out.push(m);
        if rng.gen_ratio(1, 6) {
            break;
        }
    }
    out
}

/// A random CL3 formula built from the molecules of a skeleton. Each general
/// atom of a random blind-free skeleton over `P`, `Q` and `p` becomes its
/// large molecule, one of its medium molecules, or one of its small
/// molecules (with m = 2). The result is not necessarily good.
pub fn molecular(rng: &mut impl Rng, depth: usize) -> (Formula, Signature) {
    let s = Shape {
        depth,
        general: vec![("P".into(), 0), ("Q".into(), 0)],
        elementary: vec![("p".into(), 0)],
        quantifiers: false,
        ..Shape::default()
    };
    let a = formula(rng, &s);
    let skeleton = match rng.gen_range(0..6) {
        0 => Formula::implies(a.clone(), a),
        1 => Formula::Or(vec![a.clone(), Formula::not(a)]),
        2 => Formula::implies(Formula::And(vec![a.clone(), formula(rng, &s)]), a),
        3 => Formula::implies(a.clone(), Formula::ChoiceOr(vec![a, formula(rng, &s)])),
        4 => Formula::implies(Formula::ChoiceAnd(vec![formula(rng, &s), a.clone()]), a),
        _ => a,
    };
    let sig = Signature::for_formula(&Formula::And(vec![skeleton.clone(), Formula::general("P", vec![]), Formula::general("Q", vec![])]), 2);
    let m = sig.m;
    let e = skeleton.map_atoms(&mut |at| match &at.letter {
        Letter::General(p) => match rng.gen_range(0..4) {
            0 | 1 => sig.large(p, &at.args),
            2 => sig.medium(p, rng.gen_range(1..=m), &at.args),
            _ => sig.small(p, rng.gen_range(1..=m), rng.gen_range(1..=m), &at.args),
        },
        _ => Formula::Atom(at.clone()),
    });
    (e, sig)
}
