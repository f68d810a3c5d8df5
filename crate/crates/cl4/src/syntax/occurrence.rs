//! Addresses of surface occurrences and the operations that walk them.
//!
//! An address is a list of 1-based child indices through `∧`, `∨` and `→`
//! nodes (`→` has the antecedent at 1). Negations and blind quantifiers are
//! transparent. The walk stops at the first quasiatom: an atom or a
//! choice-rooted subformula.

use super::{Formula, Quantifier};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Address(pub Vec<usize>);

impl Address {
    pub fn root() -> Address {
        Address(Vec::new())
    }

    pub fn child(&self, i: usize) -> Address {
        let mut v = self.0.clone();
        v.push(i);
        Address(v)
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.0 {
            write!(f, "{i}.")?;
        }
        Ok(())
    }
}

impl FromStr for Address {
    type Err = String;

    fn from_str(s: &str) -> Result<Address, String> {
        let s = s.trim();
        if s.is_empty() || s == "ε" {
            return Ok(Address::root());
        }
        let body = s.strip_suffix('.').ok_or_else(|| format!("address `{s}` must end with `.`"))?;
        body.split('.')
            .map(|p| match p.parse::<usize>() {
                Ok(n) if n >= 1 && !p.starts_with('0') => Ok(n),
                _ => Err(format!("bad address component `{p}` in `{s}`")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Address)
    }
}

impl Serialize for Address {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Address {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Address, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Polarity::Positive
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Occurrence {
    pub address: Address,
    pub quasiatom: Formula,
    pub polarity: Polarity,
}

/// All quasiatoms of `f`, left to right.
pub fn surface_occurrences(f: &Formula) -> Vec<Occurrence> {
    let mut out = Vec::new();
    walk(f, &mut Vec::new(), Polarity::Positive, &mut out);
    out
}

fn walk(f: &Formula, path: &mut Vec<usize>, pol: Polarity, out: &mut Vec<Occurrence>) {
    match f {
        _ if f.is_quasiatom_shape() => out.push(Occurrence {
            address: Address(path.clone()),
            quasiatom: f.clone(),
            polarity: pol,
        }),
        Formula::Not(g) => walk(g, path, pol.flip(), out),
        Formula::Forall(_, g) | Formula::Exists(_, g) => walk(g, path, pol, out),
        Formula::And(cs) | Formula::Or(cs) => {
            for (i, c) in cs.iter().enumerate() {
                path.push(i + 1);
                walk(c, path, pol, out);
                path.pop();
            }
        }
        Formula::Implies(a, b) => {
            path.push(1);
            walk(a, path, pol.flip(), out);
            path.pop();
            path.push(2);
            walk(b, path, pol, out);
            path.pop();
        }
        _ => unreachable!("choice nodes are quasiatoms"),
    }
}

/// One step of descent: the child reached by index `i` at a parallel node,
/// with the polarity change it incurs.
fn parallel_child(f: &Formula, i: usize) -> Option<(&Formula, bool)> {
    match f {
        Formula::And(cs) | Formula::Or(cs) => cs.get(i.checked_sub(1)?).map(|c| (c, false)),
        Formula::Implies(a, _) if i == 1 => Some((a, true)),
        Formula::Implies(_, b) if i == 2 => Some((b, false)),
        _ => None,
    }
}

/// The quasiatom at `addr`, with its polarity.
pub fn resolve<'a>(f: &'a Formula, addr: &Address) -> Option<(&'a Formula, Polarity)> {
    let mut cur = f;
    let mut pol = Polarity::Positive;
    let mut rest = addr.0.as_slice();
    loop {
        match cur {
            _ if cur.is_quasiatom_shape() => return rest.is_empty().then_some((cur, pol)),
            Formula::Not(g) => {
                pol = pol.flip();
                cur = g;
            }
            Formula::Forall(_, g) | Formula::Exists(_, g) => cur = g,
            _ => {
                let (&i, tail) = rest.split_first()?;
                let (c, flips) = parallel_child(cur, i)?;
                if flips {
                    pol = pol.flip();
                }
                cur = c;
                rest = tail;
            }
        }
    }
}

pub fn polarity_at(f: &Formula, addr: &Address) -> Option<Polarity> {
    resolve(f, addr).map(|(_, p)| p)
}

/// Blind quantifiers enclosing the quasiatom at `addr` (outermost first).
pub fn binders_on_path(f: &Formula, addr: &Address) -> Option<Vec<(Quantifier, String)>> {
    let mut out = Vec::new();
    let mut cur = f;
    let mut rest = addr.0.as_slice();
    loop {
        match cur {
            _ if cur.is_quasiatom_shape() => return rest.is_empty().then_some(out),
            Formula::Not(g) => cur = g,
            Formula::Forall(x, g) => {
                out.push((Quantifier::Forall, x.clone()));
                cur = g;
            }
            Formula::Exists(x, g) => {
                out.push((Quantifier::Exists, x.clone()));
                cur = g;
            }
            _ => {
                let (&i, tail) = rest.split_first()?;
                cur = parallel_child(cur, i)?.0;
                rest = tail;
            }
        }
    }
}

/// Replace the quasiatom at `addr` by `new`.
pub fn replace_at(f: &Formula, addr: &Address, new: &Formula) -> Option<Formula> {
    replace_rec(f, &addr.0, new)
}

fn replace_rec(f: &Formula, rest: &[usize], new: &Formula) -> Option<Formula> {
    match f {
        _ if f.is_quasiatom_shape() => rest.is_empty().then(|| new.clone()),
        Formula::Not(g) => Some(Formula::not(replace_rec(g, rest, new)?)),
        Formula::Forall(x, g) => Some(Formula::Forall(x.clone(), Box::new(replace_rec(g, rest, new)?))),
        Formula::Exists(x, g) => Some(Formula::Exists(x.clone(), Box::new(replace_rec(g, rest, new)?))),
        Formula::And(cs) | Formula::Or(cs) => {
            let (&i, tail) = rest.split_first()?;
            let idx = i.checked_sub(1).filter(|&k| k < cs.len())?;
            let mut cs2 = cs.clone();
            cs2[idx] = replace_rec(&cs[idx], tail, new)?;
            Some(if matches!(f, Formula::And(_)) { Formula::And(cs2) } else { Formula::Or(cs2) })
        }
        Formula::Implies(a, b) => {
            let (&i, tail) = rest.split_first()?;
            match i {
                1 => Some(Formula::implies(replace_rec(a, tail, new)?, (**b).clone())),
                2 => Some(Formula::implies((**a).clone(), replace_rec(b, tail, new)?)),
                _ => None,
            }
        }
        _ => None,
    }
}

/// If `h` coincides with `e` everywhere except possibly at the quasiatom
/// position `addr` of `e`, return the subformula of `h` found there.
pub fn match_except_at<'a>(e: &Formula, h: &'a Formula, addr: &Address) -> Option<&'a Formula> {
    let mut e = e;
    let mut h = h;
    let mut rest = addr.0.as_slice();
    loop {
        if e.is_quasiatom_shape() {
            return rest.is_empty().then_some(h);
        }
        match (e, h) {
            (Formula::Not(a), Formula::Not(b)) => {
                e = a;
                h = b;
            }
            (Formula::Forall(x, a), Formula::Forall(y, b))
            | (Formula::Exists(x, a), Formula::Exists(y, b))
                if x == y =>
            {
                e = a;
                h = b;
            }
            (Formula::And(xs), Formula::And(ys)) | (Formula::Or(xs), Formula::Or(ys))
                if xs.len() == ys.len() =>
            {
                let (&i, tail) = rest.split_first()?;
                let k = i.checked_sub(1).filter(|&k| k < xs.len())?;
                if xs.iter().zip(ys).enumerate().any(|(j, (x, y))| j != k && x != y) {
                    return None;
                }
                e = &xs[k];
                h = &ys[k];
                rest = tail;
            }
            (Formula::Implies(a1, b1), Formula::Implies(a2, b2)) => {
                let (&i, tail) = rest.split_first()?;
                match i {
                    1 if b1 == b2 => {
                        e = a1;
                        h = a2;
                    }
                    2 if a1 == a2 => {
                        e = b1;
                        h = b2;
                    }
                    _ => return None,
                }
                rest = tail;
            }
            _ => return None,
        }
    }
}

/// Split a move string into the address of the quasiatom it targets and the
/// payload that follows: numeric `i.` tokens are consumed at parallel nodes
/// until a quasiatom is reached.
pub fn parse_move<'m>(f: &Formula, mv: &'m str) -> Option<(Address, &'m str, Polarity)> {
    let mut cur = f;
    let mut pol = Polarity::Positive;
    let mut path = Vec::new();
    let mut rest = mv;
    loop {
        match cur {
            _ if cur.is_quasiatom_shape() => return Some((Address(path), rest, pol)),
            Formula::Not(g) => {
                pol = pol.flip();
                cur = g;
            }
            Formula::Forall(_, g) | Formula::Exists(_, g) => cur = g,
            _ => {
                let dot = rest.find('.')?;
                let tok = &rest[..dot];
                if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) || tok.starts_with('0') {
                    return None;
                }
                let i: usize = tok.parse().ok()?;
                let (c, flips) = parallel_child(cur, i)?;
                if flips {
                    pol = pol.flip();
                }
                path.push(i);
                cur = c;
                rest = &rest[dot + 1..];
            }
        }
    }
}
