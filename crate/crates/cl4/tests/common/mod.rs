//! Randomized semantic checks shared by the property suites and the
//! acceptance run.
//!
//! Game equality is tested extensionally: two positions denote the same game
//! when every continuation drawn from a move pool is legal in both or in
//! neither, and legal continuations have the same winner. The pool is built
//! from the formula's structure, not from the residual machinery.

#![allow(dead_code)]

use cl4::games::{
    is_manageable, is_top_delay, is_unilegal, negate_run, project, residual, winner, Interpretation, LabMove, Player,
    Projection, ResidualState, Run,
};
use cl4::gen::{self, Shape};
use cl4::syntax::{
    is_reasonable, parse_move, replace_at, resolve, surface_occurrences, Address, Formula, Letter, Polarity,
    Reasonableness, Term,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

pub type Outcome = Option<Player>;
pub type View<'a> = Box<dyn Fn(&[LabMove]) -> Outcome + 'a>;

const ATTEMPTS: usize = 2000;
const CONTINUATION: usize = 2;

/// Every move string that could matter in `f`: addresses through parallel
/// nodes, choice payloads (plus one out of range), and the moves of chosen
/// components and of atom bodies.
pub fn pool(f: &Formula, i: &Interpretation) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    match f {
        Formula::Atom(a) if matches!(a.letter, Letter::General(_) | Letter::Hybrid { .. }) => {
            out = pool(&i.expand(a).expect("covered"), i);
        }
        Formula::Atom(_) => {}
        Formula::Not(h) => out = pool(h, i),
        Formula::Forall(x, h) | Formula::Exists(x, h) => {
            for c in 0..i.universe {
                out.extend(pool(&h.substitute(x, &Term::Const(c)), i));
            }
        }
        Formula::And(cs) | Formula::Or(cs) => {
            for (k, c) in cs.iter().enumerate() {
                out.extend(pool(c, i).into_iter().map(|m| format!("{}.{m}", k + 1)));
            }
        }
        Formula::Implies(a, b) => {
            out.extend(pool(a, i).into_iter().map(|m| format!("1.{m}")));
            out.extend(pool(b, i).into_iter().map(|m| format!("2.{m}")));
        }
        Formula::ChoiceAnd(cs) | Formula::ChoiceOr(cs) => {
            out.extend((1..=cs.len() + 1).map(|k| k.to_string()));
            for c in cs {
                out.extend(pool(c, i));
            }
        }
        Formula::ChoiceForall(x, h) | Formula::ChoiceExists(x, h) => {
            out.extend((0..=i.universe).map(|c| c.to_string()));
            for c in 0..i.universe {
                out.extend(pool(&h.substitute(x, &Term::Const(c)), i));
            }
        }
    }
    out
}

/// The game `f` after `phi`.
pub fn after<'a>(f: &'a Formula, i: &'a Interpretation, phi: &'a [LabMove]) -> View<'a> {
    Box::new(move |d: &[LabMove]| {
        let g: Run = phi.iter().chain(d).cloned().collect();
        match is_unilegal(f, i, &g) {
            Ok(true) => Some(winner(f, i, &g).expect("legal run")),
            Ok(false) => None,
            Err(e) => panic!("{f}: {e}"),
        }
    })
}

/// Agreement of two games on every continuation of length at most `depth`
/// over `pool`. Illegal prefixes are not extended: legal runs are closed
/// under prefixes.
pub fn agree(a: &View<'_>, b: &View<'_>, pool: &BTreeSet<String>, depth: usize) -> Result<(), String> {
    fn go(a: &View<'_>, b: &View<'_>, pool: &BTreeSet<String>, depth: usize, d: &mut Run) -> Result<(), String> {
        let (x, y) = (a(d), b(d));
        if x != y {
            return Err(format!("continuation {} gives {x:?} vs {y:?}", cl4::games::show_run(d)));
        }
        if x.is_none() || depth == 0 {
            return Ok(());
        }
        for mv in pool {
            for p in [Player::Top, Player::Bottom] {
                d.push(LabMove::new(p, mv.clone()));
                let r = go(a, b, pool, depth - 1, d);
                d.pop();
                r?;
            }
        }
        Ok(())
    }
    go(a, b, pool, depth, &mut Vec::new())
}

fn union(i: &Interpretation, fs: &[&Formula]) -> BTreeSet<String> {
    fs.iter().flat_map(|f| pool(f, i)).collect()
}

fn shape(blind: bool) -> Shape {
    Shape {
        blind,
        general: vec![("P".into(), 0), ("Q".into(), 1), ("R".into(), 0)],
        ..Shape::default()
    }
}

fn context(rng: &mut ChaCha8Rng, f: &Formula) -> Interpretation {
    let u = rng.gen_range(1..=2);
    gen::interpretation(rng, f, u)
}

/// Split a run of a parallel node with `n` children; `None` when some move
/// does not start with a child index.
fn split(g: &[LabMove], n: usize) -> Option<Vec<Run>> {
    let mut out = vec![Vec::new(); n];
    for m in g {
        let (k, rest) = m.mv.split_once('.')?;
        if k.starts_with('0') {
            return None;
        }
        let k: usize = k.parse().ok().filter(|k| (1..=n).contains(k))?;
        out[k - 1].push(LabMove::new(m.player, rest));
    }
    Some(out)
}

fn fail<T>(what: &str, f: &Formula, g: &[LabMove], why: String) -> Result<T, String> {
    Err(format!("{what}: {f} after {}: {why}", cl4::games::show_run(g)))
}

/// Prefixation through negation: ⟨Φ⟩¬A is the negation of ⟨¬Φ⟩A.
pub fn prefix_negation(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let a = gen::formula(rng, &shape(true));
    let na = Formula::not(a.clone());
    let i = context(rng, &na);
    let phi = gen::run(rng, &na, &i, 3);
    let nphi = negate_run(&phi);
    let lhs = after(&na, &i, &phi);
    let inner = after(&a, &i, &nphi);
    let rhs: View = Box::new(move |d| inner(&negate_run(d)).map(Player::flip));
    agree(&lhs, &rhs, &pool(&na, &i), CONTINUATION).or_else(|e| fail("negation", &na, &phi, e))
}

/// Prefixation through a parallel disjunction: the position is the
/// disjunction of the positions reached by the projections.
pub fn prefix_parallel(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = rng.gen_range(2..=3);
    let mut s = shape(true);
    s.depth = 2;
    let cs: Vec<Formula> = (0..n).map(|_| gen::formula(rng, &s)).collect();
    let f = Formula::Or(cs.clone());
    let i = context(rng, &f);
    let phi = gen::run(rng, &f, &i, 4);
    let parts = split(&phi, n).expect("legal runs route");
    let lhs = after(&f, &i, &phi);
    let views: Vec<View> = cs.iter().zip(&parts).map(|(c, p)| after(c, &i, p)).collect();
    let rhs: View = Box::new(move |d| {
        let ds = split(d, n)?;
        let mut won = false;
        for (v, dk) in views.iter().zip(ds) {
            won |= v(&dk)? == Player::Top;
        }
        Some(if won { Player::Top } else { Player::Bottom })
    });
    agree(&lhs, &rhs, &pool(&f, &i), CONTINUATION).or_else(|e| fail("disjunction", &f, &phi, e))
}

/// Prefixation commutes with a blind existential quantifier.
pub fn prefix_blind_exists(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let a = gen::open_formula(rng, &shape(true), &["x"]);
    let f = Formula::Exists("x".into(), Box::new(a.clone()));
    let i = context(rng, &f);
    let phi = gen::run(rng, &f, &i, 3);
    let lhs = after(&f, &i, &phi);
    let inst: Vec<Formula> = (0..i.universe).map(|c| a.substitute("x", &Term::Const(c))).collect();
    let views: Vec<View> = inst.iter().map(|g| after(g, &i, &phi)).collect();
    let rhs: View = Box::new(move |d| {
        let outs: Option<Vec<Player>> = views.iter().map(|v| v(d)).collect();
        outs.map(|o| if o.contains(&Player::Top) { Player::Top } else { Player::Bottom })
    });
    agree(&lhs, &rhs, &pool(&f, &i), CONTINUATION).or_else(|e| fail("blind exists", &f, &phi, e))
}

fn is_play(q: &Formula) -> bool {
    match q {
        Formula::Atom(a) => matches!(a.letter, Letter::General(_) | Letter::Hybrid { .. }),
        q => q.is_choice(),
    }
}

/// The game a non-elementary quasiatom becomes after `run` (signed), as a
/// formula, when the stored play can be absorbed: choice quasiatoms whose
/// chosen parts saw no atom play, and atoms, through their bodies.
fn absorbed(q: &Formula, i: &Interpretation, run: &[LabMove]) -> Option<Formula> {
    let base = match q {
        Formula::Atom(a) => i.expand(a).expect("covered"),
        q => q.clone(),
    };
    let r = residual(&base, i, run).ok()?;
    r.stored.is_empty().then_some(r.formula)
}

/// Replacing a quasiatom by the game it has become, while deleting its moves
/// from the position, leaves the position unchanged.
pub fn prefix_replacement(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..ATTEMPTS {
        let e = gen::formula(rng, &shape(false));
        let i = context(rng, &e);
        let phi = gen::run(rng, &e, &i, 4);
        let occs: Vec<_> = surface_occurrences(&e).into_iter().filter(|o| is_play(&o.quasiatom)).collect();
        let Some(o) = occs.choose(rng) else { continue };
        let sub = project(&phi, &o.address, Projection::Signed(&e)).expect("resolves");
        let Some(f) = absorbed(&o.quasiatom, &i, &sub) else { continue };
        let h = replace_at(&e, &o.address, &f).expect("resolves");
        let rest = project(&phi, &o.address, Projection::Delete).expect("delete");
        let hyp_l = after(&o.quasiatom, &i, &sub);
        let hyp_r = after(&f, &i, &[]);
        agree(&hyp_l, &hyp_r, &union(&i, &[&o.quasiatom, &f]), CONTINUATION)
            .or_else(|e2| fail("hypothesis", &o.quasiatom, &sub, e2))?;
        let lhs = after(&e, &i, &phi);
        let rhs = after(&h, &i, &rest);
        return agree(&lhs, &rhs, &union(&i, &[&e, &h]), CONTINUATION).or_else(|e2| fail("replacement", &e, &phi, e2));
    }
    Err("no instance generated".into())
}

/// Finalization version of the replacement property, with the quasiatom
/// replaced by the truth value it finalizes to.
pub fn finalize_replacement(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..ATTEMPTS {
        let e = gen::formula(rng, &shape(false));
        let i = context(rng, &e);
        let g = gen::run(rng, &e, &i, 4);
        let occs: Vec<_> = surface_occurrences(&e).into_iter().filter(|o| is_play(&o.quasiatom)).collect();
        let Some(o) = occs.choose(rng) else { continue };
        let sub = project(&g, &o.address, Projection::Signed(&e)).expect("resolves");
        let f = match winner(&o.quasiatom, &i, &sub).map_err(|e2| e2.to_string())? {
            Player::Top => Formula::top(),
            Player::Bottom => Formula::bottom(),
        };
        let h = replace_at(&e, &o.address, &f).expect("resolves");
        let rest = project(&g, &o.address, Projection::Delete).expect("delete");
        if !is_unilegal(&h, &i, &rest).map_err(|e2| e2.to_string())? {
            return fail("finalization replacement legality", &h, &rest, "illegal".into());
        }
        let (w1, w2) = (winner(&e, &i, &g).unwrap(), winner(&h, &i, &rest).unwrap());
        return if w1 == w2 { Ok(()) } else { fail("finalization replacement", &e, &g, format!("{w1} vs {w2} in {h}")) };
    }
    Err("no instance generated".into())
}

/// Unresolved choices finalize to ⊤ for ⊓-types and ⊥ for ⊔-types.
pub fn unresolved_choice(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let mut s = shape(false);
    s.depth = 2;
    let n = rng.gen_range(2..=3);
    let cs: Vec<Formula> = (0..n).map(|_| gen::formula(rng, &s)).collect();
    let body = gen::open_formula(rng, &s, &["x"]);
    let (f, expect) = match rng.gen_range(0..4) {
        0 => (Formula::ChoiceAnd(cs), Player::Top),
        1 => (Formula::ChoiceOr(cs), Player::Bottom),
        2 => (Formula::ChoiceForall("x".into(), Box::new(body)), Player::Top),
        _ => (Formula::ChoiceExists("x".into(), Box::new(body)), Player::Bottom),
    };
    let i = context(rng, &f);
    let w = winner(&f, &i, &[]).map_err(|e| e.to_string())?;
    if w == expect {
        Ok(())
    } else {
        fail("unresolved choice", &f, &[], format!("won by {w}"))
    }
}

/// Finalization through negation, parallel disjunction and blind ∃.
pub fn finalize_decomposition(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let s = shape(true);
    let a = gen::formula(rng, &s);
    let na = Formula::not(a.clone());
    let i = context(rng, &na);
    let g = gen::run(rng, &na, &i, 4);
    let (l, r) = (winner(&na, &i, &g).unwrap(), winner(&a, &i, &negate_run(&g)).unwrap().flip());
    if l != r {
        return fail("finalize negation", &na, &g, format!("{l} vs {r}"));
    }

    let n = rng.gen_range(2..=3);
    let mut s2 = s.clone();
    s2.depth = 2;
    let cs: Vec<Formula> = (0..n).map(|_| gen::formula(rng, &s2)).collect();
    let f = Formula::Or(cs.clone());
    let i = context(rng, &f);
    let g = gen::run(rng, &f, &i, 4);
    let parts = split(&g, n).expect("legal runs route");
    let any = cs.iter().zip(&parts).any(|(c, p)| winner(c, &i, p).unwrap() == Player::Top);
    if (winner(&f, &i, &g).unwrap() == Player::Top) != any {
        return fail("finalize disjunction", &f, &g, "mismatch".into());
    }

    let a = gen::open_formula(rng, &s2, &["x"]);
    let f = Formula::Exists("x".into(), Box::new(a.clone()));
    let i = context(rng, &f);
    let g = gen::run(rng, &f, &i, 4);
    let any = (0..i.universe).any(|c| winner(&a.substitute("x", &Term::Const(c)), &i, &g).unwrap() == Player::Top);
    if (winner(&f, &i, &g).unwrap() == Player::Top) != any {
        return fail("finalize blind exists", &f, &g, "mismatch".into());
    }
    Ok(())
}

/// A reasonable hyperformula: a random formula in which, half the time, one
/// positive and one negative surface occurrence of the same general letter
/// become a hybrid pair.
pub fn reasonable_hyperformula(rng: &mut ChaCha8Rng) -> Formula {
    if rng.gen_bool(0.5) {
        return gen::formula(rng, &shape(false));
    }
    loop {
        let e = gen::formula(rng, &shape(false));
        let occs = surface_occurrences(&e);
        let atoms: Vec<_> = occs
            .iter()
            .filter(|o| matches!(&o.quasiatom, Formula::Atom(a) if a.letter.is_general()))
            .collect();
        let pairs: Vec<_> = atoms
            .iter()
            .flat_map(|p| atoms.iter().map(move |n| (*p, *n)))
            .filter(|(p, n)| {
                p.polarity == Polarity::Positive
                    && n.polarity == Polarity::Negative
                    && matches!((&p.quasiatom, &n.quasiatom), (Formula::Atom(a), Formula::Atom(b)) if a.letter == b.letter)
            })
            .collect();
        let Some((p, n)) = pairs.choose(rng) else { continue };
        let h = hybridize(&e, &p.address, &n.address);
        if is_reasonable(&h) == Reasonableness::Reasonable {
            return h;
        }
    }
}

fn hybridize(e: &Formula, pi: &Address, nu: &Address) -> Formula {
    let mut h = e.clone();
    for addr in [pi, nu] {
        let Some((Formula::Atom(a), _)) = resolve(&h, addr) else { panic!("not an atom") };
        let Letter::General(p) = &a.letter else { panic!("not general") };
        let new = Formula::atom(Letter::Hybrid { general: p.clone(), elementary: "h".into() }, a.args.clone());
        h = replace_at(&h, addr, &new).expect("resolves");
    }
    h
}

fn atom_at(e: &Formula, addr: &Address) -> Option<Letter> {
    match resolve(e, addr) {
        Some((Formula::Atom(a), _)) if matches!(a.letter, Letter::General(_) | Letter::Hybrid { .. }) => {
            Some(a.letter.clone())
        }
        _ => None,
    }
}

/// The other occurrence of the hybrid atom at `addr`.
fn twin(e: &Formula, addr: &Address) -> Option<Address> {
    let letter = atom_at(e, addr)?;
    if !matches!(letter, Letter::Hybrid { .. }) {
        return None;
    }
    surface_occurrences(e)
        .into_iter()
        .find(|o| o.address != *addr && matches!(&o.quasiatom, Formula::Atom(a) if a.letter == letter))
        .map(|o| o.address)
}

/// A random E-manageable position: ⊥ moves in general and hybrid
/// quasiatoms, each hybrid move answered at once by ⊤ copying it into the
/// twin occurrence.
pub fn manageable_position(rng: &mut ChaCha8Rng, e: &Formula, i: &Interpretation, max: usize) -> Run {
    let mut state = ResidualState::new(e.clone());
    let mut out = Vec::new();
    while out.len() < max {
        let moves: Vec<String> = state
            .legal_moves(i, Player::Bottom)
            .into_iter()
            .filter(|mv| parse_move(e, mv).is_some_and(|(a, _, _)| atom_at(e, &a).is_some()))
            .collect();
        let Some(mv) = moves.choose(rng) else { break };
        let m = LabMove::bottom(mv.clone());
        state.apply(i, &m).expect("listed");
        out.push(m);
        let (addr, beta, _) = parse_move(e, mv).expect("parsed");
        if let Some(sigma) = twin(e, &addr) {
            let copy = LabMove::top(format!("{sigma}{beta}"));
            if state.apply(i, &copy).is_err() {
                break;
            }
            out.push(copy);
        }
        if rng.gen_ratio(1, 4) {
            break;
        }
    }
    out
}

fn choice_at(e: &Formula, want: fn(&Formula) -> bool, mover: Player) -> Vec<(Address, Formula)> {
    surface_occurrences(e)
        .into_iter()
        .filter(|o| want(&o.quasiatom))
        .filter(|o| {
            let natural = if matches!(o.quasiatom, Formula::ChoiceAnd(_) | Formula::ChoiceForall(..)) {
                Player::Bottom
            } else {
                Player::Top
            };
            let m = if o.polarity == Polarity::Positive { natural } else { natural.flip() };
            m == mover
        })
        .map(|o| (o.address, o.quasiatom))
        .collect()
}

fn resolve_choice(q: &Formula, payload: &str) -> Formula {
    match q {
        Formula::ChoiceAnd(cs) | Formula::ChoiceOr(cs) => cs[payload.parse::<usize>().unwrap() - 1].clone(),
        Formula::ChoiceForall(x, h) | Formula::ChoiceExists(x, h) => h.substitute(x, &Term::Const(payload.parse().unwrap())),
        _ => unreachable!(),
    }
}

fn is_connective_choice(q: &Formula) -> bool {
    matches!(q, Formula::ChoiceAnd(_) | Formula::ChoiceOr(_))
}

fn is_quantifier_choice(q: &Formula) -> bool {
    matches!(q, Formula::ChoiceForall(..) | Formula::ChoiceExists(..))
}

/// ⊤ resolving a negative ⊓ or positive ⊔ quasiatom (`quantifier` false) or
/// a negative ⊓x or positive ⊔x one (`quantifier` true) after a manageable
/// Ω: Ω stays manageable for the resolved formula, and the positions agree.
pub fn top_choice(rng: &mut ChaCha8Rng, quantifier: bool) -> Result<(), String> {
    let want = if quantifier { is_quantifier_choice } else { is_connective_choice };
    for _ in 0..ATTEMPTS {
        let e = reasonable_hyperformula(rng);
        let targets = choice_at(&e, want, Player::Top);
        let Some((gamma, q)) = targets.choose(rng).cloned() else { continue };
        let i = context(rng, &e);
        let omega = manageable_position(rng, &e, &i, 4);
        if is_manageable(&e, &omega).is_err() {
            continue;
        }
        let payload = match &q {
            Formula::ChoiceAnd(cs) | Formula::ChoiceOr(cs) => rng.gen_range(1..=cs.len()).to_string(),
            _ => rng.gen_range(0..i.universe).to_string(),
        };
        let h = replace_at(&e, &gamma, &resolve_choice(&q, &payload)).expect("resolves");
        if let Err(v) = is_manageable(&h, &omega) {
            return fail("manageability after resolution", &h, &omega, v.to_string());
        }
        let mut full = omega.clone();
        full.push(LabMove::top(format!("{gamma}{payload}")));
        let lhs = after(&e, &i, &full);
        let rhs = after(&h, &i, &omega);
        return agree(&lhs, &rhs, &union(&i, &[&e, &h]), CONTINUATION).or_else(|e2| fail("choice resolution", &e, &full, e2));
    }
    Err("no instance generated".into())
}

/// Turning a positive and a negative occurrence of a general letter into a
/// hybrid pair and letting ⊤ copy the ⊥ moves of each into the other yields
/// a manageable legal position of the hybrid formula.
pub fn hybrid_copy(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..ATTEMPTS {
        let e = gen::formula(rng, &shape(false));
        let occs = surface_occurrences(&e);
        let atoms: Vec<_> =
            occs.iter().filter(|o| matches!(&o.quasiatom, Formula::Atom(a) if a.letter.is_general())).collect();
        let pairs: Vec<_> = atoms
            .iter()
            .flat_map(|p| atoms.iter().map(move |n| (*p, *n)))
            .filter(|(p, n)| {
                p.polarity == Polarity::Positive
                    && n.polarity == Polarity::Negative
                    && matches!((&p.quasiatom, &n.quasiatom), (Formula::Atom(a), Formula::Atom(b)) if a.letter == b.letter)
            })
            .collect();
        let Some((p, n)) = pairs.choose(rng) else { continue };
        let h = hybridize(&e, &p.address, &n.address);
        if is_reasonable(&h) != Reasonableness::Reasonable {
            continue;
        }
        let i = context(rng, &e);
        let omega = manageable_position(rng, &e, &i, 4);
        if is_manageable(&e, &omega).is_err() {
            continue;
        }
        let (pi, nu) = (&p.address, &n.address);
        let mut phi = omega.clone();
        for m in project(&omega, nu, Projection::Raw).unwrap() {
            phi.push(LabMove::top(format!("{pi}{}", m.mv)));
        }
        for m in project(&omega, pi, Projection::Raw).unwrap() {
            phi.push(LabMove::top(format!("{nu}{}", m.mv)));
        }
        if !is_unilegal(&h, &i, &phi).map_err(|e2| e2.to_string())? {
            return fail("hybrid copy legality", &h, &phi, "illegal".into());
        }
        return is_manageable(&h, &phi).or_else(|v| fail("hybrid copy manageability", &h, &phi, v.to_string()));
    }
    Err("no instance generated".into())
}

/// Every legal ⊥ move after a manageable position falls under one of the
/// four cases, each with its conclusion.
pub fn bottom_move_cases(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..ATTEMPTS {
        let e = reasonable_hyperformula(rng);
        let i = context(rng, &e);
        let omega = manageable_position(rng, &e, &i, 3);
        if is_manageable(&e, &omega).is_err() {
            continue;
        }
        let moves: Vec<String> = pool(&e, &i)
            .into_iter()
            .filter(|mv| {
                let mut g = omega.clone();
                g.push(LabMove::bottom(mv.clone()));
                is_unilegal(&e, &i, &g).unwrap()
            })
            .collect();
        let Some(alpha) = moves.choose(rng) else { continue };
        let mut g = omega.clone();
        g.push(LabMove::bottom(alpha.clone()));
        let Some((gamma, beta, _)) = parse_move(&e, alpha) else {
            return fail("case analysis", &e, &g, "legal move addresses no quasiatom".into());
        };
        let (q, _) = resolve(&e, &gamma).expect("resolves");
        return match q {
            Formula::Atom(a) if a.letter.is_general() => {
                is_manageable(&e, &g).or_else(|v| fail("case (general)", &e, &g, v.to_string()))
            }
            Formula::Atom(a) if a.letter.is_hybrid() => {
                let sigma = twin(&e, &gamma).expect("balanced");
                g.push(LabMove::top(format!("{sigma}{beta}")));
                if !is_unilegal(&e, &i, &g).unwrap() {
                    return fail("case (hybrid) legality", &e, &g, "illegal".into());
                }
                is_manageable(&e, &g).or_else(|v| fail("case (hybrid)", &e, &g, v.to_string()))
            }
            q if q.is_choice() => {
                let h = replace_at(&e, &gamma, &resolve_choice(q, beta)).expect("resolves");
                if let Err(v) = is_manageable(&h, &omega) {
                    return fail("case (choice) manageability", &h, &omega, v.to_string());
                }
                let lhs = after(&e, &i, &g);
                let rhs = after(&h, &i, &omega);
                agree(&lhs, &rhs, &union(&i, &[&e, &h]), CONTINUATION).or_else(|e2| fail("case (choice)", &e, &g, e2))
            }
            _ => fail("case analysis", &e, &g, format!("legal move in elementary {q}")),
        };
    }
    Err("no instance generated".into())
}

/// All legal runs of `f` of length at most `len` over its move pool.
pub fn legal_runs(f: &Formula, i: &Interpretation, len: usize) -> Vec<Run> {
    let moves = pool(f, i);
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for g in &frontier {
            for mv in &moves {
                for p in [Player::Top, Player::Bottom] {
                    let mut h: Run = g.clone();
                    h.push(LabMove::new(p, mv.clone()));
                    if is_unilegal(f, i, &h).unwrap() {
                        next.push(h);
                    }
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Every interleaving of the ⊤- and ⊥-subsequences of `g`.
fn interleavings(g: &[LabMove]) -> Vec<Run> {
    let tops: Vec<&LabMove> = g.iter().filter(|m| m.player == Player::Top).collect();
    let bots: Vec<&LabMove> = g.iter().filter(|m| m.player == Player::Bottom).collect();
    let mut out = Vec::new();
    fn go(t: &[&LabMove], b: &[&LabMove], acc: &mut Run, out: &mut Vec<Run>) {
        if t.is_empty() && b.is_empty() {
            out.push(acc.clone());
            return;
        }
        if let Some((x, rest)) = t.split_first() {
            acc.push((*x).clone());
            go(rest, b, acc, out);
            acc.pop();
        }
        if let Some((x, rest)) = b.split_first() {
            acc.push((*x).clone());
            go(t, rest, acc, out);
            acc.pop();
        }
    }
    go(&tops, &bots, &mut Vec::new(), &mut out);
    out
}

/// `d` delays `p`'s moves relative to `g`: each `p`-move has at least as
/// many opponent moves before it in `d` as in `g`.
fn delays(d: &[LabMove], g: &[LabMove], p: Player) -> bool {
    let before = |r: &[LabMove]| -> Vec<usize> {
        let mut seen = 0;
        let mut out = Vec::new();
        for m in r {
            if m.player == p {
                out.push(seen);
            } else {
                seen += 1;
            }
        }
        out
    };
    before(d).iter().zip(before(g)).all(|(a, b)| *a >= b)
}

/// Static-game brute force on one sampled game: ⊤-won legal runs stay
/// ⊤-won under legal ⊤-delays, and dually for ⊥.
pub fn static_delays(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let mut s = shape(true);
    s.depth = 2;
    let f = gen::formula(rng, &s);
    let i = context(rng, &f);
    let mut checked = 0;
    for g in legal_runs(&f, &i, 4) {
        let w = winner(&f, &i, &g).unwrap();
        for d in interleavings(&g) {
            if delays(&d, &g, Player::Top) != is_top_delay(&d, &g) {
                return fail("delay oracle", &f, &g, format!("disagrees with is_top_delay on {}", cl4::games::show_run(&d)));
            }
            if !delays(&d, &g, w) {
                continue;
            }
            if is_unilegal(&f, &i, &d).unwrap() {
                checked += 1;
                if winner(&f, &i, &d).unwrap() != w {
                    return fail("static", &f, &g, format!("delay {} is lost by {w}", cl4::games::show_run(&d)));
                }
            }
        }
    }
    Ok(checked)
}

/// Run `check` on `cases` consecutive seeds from `seed`.
pub fn suite(seed: u64, cases: usize, check: impl Fn(&mut ChaCha8Rng) -> Result<(), String>) -> Result<(), String> {
    for k in 0..cases as u64 {
        check(&mut gen::rng(seed + k)).map_err(|e| format!("seed {}: {e}", seed + k))?;
    }
    Ok(())
}
