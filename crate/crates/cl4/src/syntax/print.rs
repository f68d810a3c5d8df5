//! Canonical ASCII rendering. `parse(&f.to_string()) == f` for every formula.

use super::{Atom, Formula};
use std::fmt;

// Binding levels: higher binds tighter.
const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => IMPLIES,
        Formula::Or(_) | Formula::ChoiceOr(_) => OR,
        Formula::And(_) | Formula::ChoiceAnd(_) => AND,
        _ => UNARY,
    }
}

fn render(f: &Formula, out: &mut String) {
    match f {
        Formula::Atom(a) => out.push_str(&a.to_string()),
        Formula::Not(g) => {
            out.push('~');
            operand(g, UNARY, out);
        }
        Formula::And(cs) => chain(cs, " /\\ ", AND, out),
        Formula::ChoiceAnd(cs) => chain(cs, " !/\\ ", AND, out),
        Formula::Or(cs) => chain(cs, " \\/ ", OR, out),
        Formula::ChoiceOr(cs) => chain(cs, " !\\/ ", OR, out),
        Formula::Implies(a, b) => {
            operand(a, IMPLIES + 1, out);
            out.push_str(" -> ");
            operand(b, IMPLIES, out);
        }
        _ => {
            let (q, x, body) = f.binder().expect("quantifier");
            let sym = match q {
                super::Quantifier::Forall => "A",
                super::Quantifier::Exists => "E",
                super::Quantifier::ChoiceForall => "!A",
                super::Quantifier::ChoiceExists => "!E",
            };
            out.push_str(sym);
            out.push(' ');
            out.push_str(x);
            out.push_str(". ");
            if body.binder().is_some() {
                render(body, out);
            } else {
                operand(body, UNARY, out);
            }
        }
    }
}

fn chain(cs: &[Formula], sep: &str, lvl: u8, out: &mut String) {
    for (i, c) in cs.iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        operand(c, lvl + 1, out);
    }
}

/// Render `g` in a position requiring binding level at least `min`. Quantifiers
/// outside a quantifier body are always parenthesized, since their bodies
/// would otherwise swallow whatever follows.
fn operand(g: &Formula, min: u8, out: &mut String) {
    if level(g) < min || g.binder().is_some() {
        out.push('(');
        render(g, out);
        out.push(')');
    } else {
        render(g, out);
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        render(self, &mut s);
        f.write_str(&s)
    }
}
