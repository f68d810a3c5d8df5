//! First-order search: Herbrand ground refutation and finite countermodels.

use super::sat::{self, Prop};
use super::Countermodel;
use crate::syntax::{Atom, Formula, Letter, Term};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
#[error("ground expansion exceeded {0} nodes")]
pub(super) struct Exhausted(usize);

/// Herbrand terms over Skolem symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum HTerm {
    Var(usize),
    Fun(usize, Vec<HTerm>),
}

/// Negation normal form of the Skolemized negation.
enum Nnf {
    Lit(bool, Letter, Vec<HTerm>),
    Bool(bool),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
    All(usize, Box<Nnf>),
}

struct Skolemizer {
    arities: Vec<usize>,
    constants: HashMap<Term, usize>,
    next_var: usize,
}

impl Skolemizer {
    fn symbol(&mut self, arity: usize) -> usize {
        self.arities.push(arity);
        self.arities.len() - 1
    }

    fn term(&mut self, t: &Term, env: &[(String, HTerm)]) -> HTerm {
        if let Term::Var(v) = t {
            if let Some((_, h)) = env.iter().rev().find(|(x, _)| x == v) {
                return h.clone();
            }
        }
        // Constants and free variables are opaque 0-ary symbols.
        let id = match self.constants.get(t) {
            Some(&id) => id,
            None => {
                let id = self.symbol(0);
                self.constants.insert(t.clone(), id);
                id
            }
        };
        HTerm::Fun(id, Vec::new())
    }

    /// NNF of `f` (negated when `neg`), Skolemizing existentials.
    fn nnf(&mut self, f: &Formula, neg: bool, universals: &mut Vec<usize>, env: &mut Vec<(String, HTerm)>) -> Nnf {
        match f {
            Formula::Atom(a) => match a.letter {
                Letter::Top => Nnf::Bool(!neg),
                Letter::Bottom => Nnf::Bool(neg),
                _ => {
                    let args = a.args.iter().map(|t| self.term(t, env)).collect();
                    Nnf::Lit(!neg, a.letter.clone(), args)
                }
            },
            Formula::Not(g) => self.nnf(g, !neg, universals, env),
            Formula::And(cs) | Formula::Or(cs) => {
                let parts = cs.iter().map(|c| self.nnf(c, neg, universals, env)).collect();
                if matches!(f, Formula::And(_)) != neg {
                    Nnf::And(parts)
                } else {
                    Nnf::Or(parts)
                }
            }
            Formula::Implies(a, b) => {
                let l = self.nnf(a, !neg, universals, env);
                let r = self.nnf(b, neg, universals, env);
                if neg {
                    Nnf::And(vec![l, r])
                } else {
                    Nnf::Or(vec![l, r])
                }
            }
            Formula::Forall(x, g) | Formula::Exists(x, g) => {
                if matches!(f, Formula::Forall(..)) != neg {
                    let u = self.next_var;
                    self.next_var += 1;
                    env.push((x.clone(), HTerm::Var(u)));
                    universals.push(u);
                    let body = self.nnf(g, neg, universals, env);
                    universals.pop();
                    env.pop();
                    Nnf::All(u, Box::new(body))
                } else {
                    let id = self.symbol(universals.len());
                    let sk = HTerm::Fun(id, universals.iter().map(|&u| HTerm::Var(u)).collect());
                    env.push((x.clone(), sk));
                    let body = self.nnf(g, neg, universals, env);
                    env.pop();
                    body
                }
            }
            _ => unreachable!("elementary input"),
        }
    }
}

fn herbrand_universe(arities: &[usize], depth: usize, cap: usize) -> Result<Vec<HTerm>, Exhausted> {
    let mut universe: Vec<HTerm> = (0..arities.len())
        .filter(|&i| arities[i] == 0)
        .map(|i| HTerm::Fun(i, Vec::new()))
        .collect();
    if universe.is_empty() {
        universe.push(HTerm::Fun(usize::MAX, Vec::new()));
    }
    for _ in 0..depth {
        let mut next = universe.clone();
        for (id, &n) in arities.iter().enumerate().filter(|(_, &n)| n > 0) {
            let mut idx = vec![0usize; n];
            loop {
                let t = HTerm::Fun(id, idx.iter().map(|&i| universe[i].clone()).collect());
                if !next.contains(&t) {
                    next.push(t);
                }
                if next.len() > cap {
                    return Err(Exhausted(cap));
                }
                let mut k = 0;
                while k < n {
                    idx[k] += 1;
                    if idx[k] < universe.len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == n {
                    break;
                }
            }
        }
        universe = next;
    }
    Ok(universe)
}

fn instantiate(t: &HTerm, env: &HashMap<usize, HTerm>) -> HTerm {
    match t {
        HTerm::Var(u) => env[u].clone(),
        HTerm::Fun(id, args) => HTerm::Fun(*id, args.iter().map(|a| instantiate(a, env)).collect()),
    }
}

struct Grounder<'u, K> {
    universe: &'u [HTerm],
    atoms: HashMap<K, usize>,
    nodes: usize,
    cap: usize,
}

impl<K: std::hash::Hash + Eq> Grounder<'_, K> {
    fn var(&mut self, key: K) -> usize {
        let n = self.atoms.len();
        *self.atoms.entry(key).or_insert(n)
    }

    fn tick(&mut self) -> Result<(), Exhausted> {
        self.nodes += 1;
        if self.nodes > self.cap {
            Err(Exhausted(self.cap))
        } else {
            Ok(())
        }
    }
}

fn ground_nnf(
    n: &Nnf,
    env: &mut HashMap<usize, HTerm>,
    g: &mut Grounder<'_, (Letter, Vec<HTerm>)>,
) -> Result<Prop, Exhausted> {
    g.tick()?;
    Ok(match n {
        Nnf::Bool(b) => Prop::Const(*b),
        Nnf::Lit(pos, letter, args) => {
            let args = args.iter().map(|a| instantiate(a, env)).collect();
            let v = Prop::Var(g.var((letter.clone(), args)));
            if *pos {
                v
            } else {
                Prop::Not(Box::new(v))
            }
        }
        Nnf::And(cs) => Prop::And(cs.iter().map(|c| ground_nnf(c, env, g)).collect::<Result<_, _>>()?),
        Nnf::Or(cs) => Prop::Or(cs.iter().map(|c| ground_nnf(c, env, g)).collect::<Result<_, _>>()?),
        Nnf::All(u, body) => {
            let mut parts = Vec::new();
            for t in g.universe {
                env.insert(*u, t.clone());
                parts.push(ground_nnf(body, env, g)?);
            }
            env.remove(u);
            Prop::And(parts)
        }
    })
}

/// True when the ground instances of the Skolemized negation over Herbrand
/// terms of depth at most `depth` are propositionally unsatisfiable.
pub(super) fn herbrand_refutes(f: &Formula, depth: usize, cap: usize) -> Result<bool, Exhausted> {
    let mut sk = Skolemizer { arities: Vec::new(), constants: HashMap::new(), next_var: 0 };
    let nnf = sk.nnf(f, true, &mut Vec::new(), &mut Vec::new());
    let universe = herbrand_universe(&sk.arities, depth, cap)?;
    let mut g = Grounder { universe: &universe, atoms: HashMap::new(), nodes: 0, cap };
    let p = ground_nnf(&nnf, &mut HashMap::new(), &mut g)?;
    Ok(sat::satisfiable(&p, g.atoms.len()).is_none())
}

/// Ground `f` (negated) over the domain `0..k` given an element for every
/// constant and free variable.
fn ground_domain(
    f: &Formula,
    neg: bool,
    k: usize,
    fixed: &BTreeMap<Term, usize>,
    env: &mut Vec<(String, usize)>,
    g: &mut Grounder<'_, (Letter, Vec<usize>)>,
) -> Result<Prop, Exhausted> {
    g.tick()?;
    let p = match f {
        Formula::Atom(a) => match a.letter {
            Letter::Top => Prop::Const(true),
            Letter::Bottom => Prop::Const(false),
            _ => {
                let args = a
                    .args
                    .iter()
                    .map(|t| match t {
                        Term::Var(v) => env
                            .iter()
                            .rev()
                            .find(|(x, _)| x == v)
                            .map(|(_, e)| *e)
                            .unwrap_or_else(|| fixed[t]),
                        Term::Const(_) => fixed[t],
                    })
                    .collect();
                Prop::Var(g.var((a.letter.clone(), args)))
            }
        },
        Formula::Not(h) => Prop::Not(Box::new(ground_domain(h, false, k, fixed, env, g)?)),
        Formula::And(cs) | Formula::Or(cs) => {
            let parts = cs
                .iter()
                .map(|c| ground_domain(c, false, k, fixed, env, g))
                .collect::<Result<Vec<_>, _>>()?;
            if matches!(f, Formula::And(_)) {
                Prop::And(parts)
            } else {
                Prop::Or(parts)
            }
        }
        Formula::Implies(a, b) => Prop::Or(vec![
            Prop::Not(Box::new(ground_domain(a, false, k, fixed, env, g)?)),
            ground_domain(b, false, k, fixed, env, g)?,
        ]),
        Formula::Forall(x, h) | Formula::Exists(x, h) => {
            let mut parts = Vec::new();
            for e in 0..k {
                env.push((x.clone(), e));
                parts.push(ground_domain(h, false, k, fixed, env, g)?);
                env.pop();
            }
            if matches!(f, Formula::Forall(..)) {
                Prop::And(parts)
            } else {
                Prop::Or(parts)
            }
        }
        _ => unreachable!("elementary input"),
    };
    Ok(if neg { Prop::Not(Box::new(p)) } else { p })
}

/// A countermodel with exactly `k` elements, if one exists. Assignments of
/// constants and free variables are enumerated up to a permutation of the
/// domain (restricted growth strings).
pub(super) fn countermodel_of_size(f: &Formula, k: usize, cap: usize) -> Result<Option<Countermodel>, Exhausted> {
    let mut names: Vec<Term> = f.free_variables().into_iter().map(Term::Var).collect();
    names.extend(f.constants().into_iter().map(Term::Const));
    let mut assign = vec![0usize; names.len()];
    loop {
        let fixed: BTreeMap<Term, usize> = names.iter().cloned().zip(assign.iter().copied()).collect();
        let mut g = Grounder { universe: &[], atoms: HashMap::new(), nodes: 0, cap };
        let p = ground_domain(f, true, k, &fixed, &mut Vec::new(), &mut g)?;
        if let Some(model) = sat::satisfiable(&p, g.atoms.len()) {
            let mut atoms = BTreeMap::new();
            for ((letter, args), v) in g.atoms {
                if model[v] {
                    let args = args.into_iter().map(|e| Term::Const(e as u64)).collect();
                    atoms.insert(Atom::new(letter, args).to_string(), true);
                }
            }
            let terms = fixed.into_iter().map(|(t, e)| (t.to_string(), e)).collect();
            return Ok(Some(Countermodel { domain: k, terms, atoms }));
        }
        if !next_growth_string(&mut assign, k) {
            return Ok(None);
        }
    }
}

/// Advance to the next restricted growth string with values below `k`.
fn next_growth_string(a: &mut [usize], k: usize) -> bool {
    for i in (0..a.len()).rev() {
        let bound = a[..i].iter().copied().max().map_or(0, |m| m + 1);
        if a[i] < bound.min(k - 1) {
            a[i] += 1;
            for x in &mut a[i + 1..] {
                *x = 0;
            }
            return true;
        }
    }
    false
}
