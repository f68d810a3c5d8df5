//! Recursive-descent parser for the ASCII grammar (Unicode operators accepted).
//!
//! Precedence, tightest first: `~`, then `/\` and `!/\`, then `\/` and `!\/`,
//! then `->` (right associative). Quantifier bodies extend as far right as
//! possible.

use super::fresh::is_variable_name;
use super::{Atom, Formula, Letter, Term};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    LParen,
    RParen,
    Comma,
    Dot,
    Hash,
    Not,
    And,
    Or,
    Implies,
    CAnd,
    COr,
    /// `∀`, `∃`, `!A`, `!E`.
    Forall,
    Exists,
    CForall,
    CExists,
    /// Unicode `⊓` / `⊔`, binary or quantifier depending on position.
    Sqcap,
    Sqcup,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, column, message: String| ParseError { line, column, message };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let starts = |s: &str| {
            let s: Vec<char> = s.chars().collect();
            chars.len() >= i + s.len() && chars[i..i + s.len()] == s[..]
        };
        let mut push = |tok: Tok, width: usize, i: &mut usize, col: &mut usize| {
            out.push(Token { tok, line: l0, column: c0 });
            *i += width;
            *col += width;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if starts("!/\\") {
            push(Tok::CAnd, 3, &mut i, &mut col);
        } else if starts("!\\/") {
            push(Tok::COr, 3, &mut i, &mut col);
        } else if starts("!A") || starts("!E") {
            let next = chars.get(i + 2).copied();
            if next.is_some_and(|n| n.is_ascii_alphanumeric() || n == '_') {
                return Err(err(l0, c0, "expected `!A` or `!E` quantifier".into()));
            }
            let tok = if chars[i + 1] == 'A' { Tok::CForall } else { Tok::CExists };
            push(tok, 2, &mut i, &mut col);
        } else if starts("/\\") {
            push(Tok::And, 2, &mut i, &mut col);
        } else if starts("\\/") {
            push(Tok::Or, 2, &mut i, &mut col);
        } else if starts("->") {
            push(Tok::Implies, 2, &mut i, &mut col);
        } else {
            let single = match c {
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                ',' => Some(Tok::Comma),
                '.' => Some(Tok::Dot),
                '#' => Some(Tok::Hash),
                '~' | '¬' => Some(Tok::Not),
                '∧' => Some(Tok::And),
                '∨' => Some(Tok::Or),
                '→' => Some(Tok::Implies),
                '⊓' => Some(Tok::Sqcap),
                '⊔' => Some(Tok::Sqcup),
                '∀' => Some(Tok::Forall),
                '∃' => Some(Tok::Exists),
                '⊤' => Some(Tok::Ident("T".into())),
                '⊥' => Some(Tok::Ident("F".into())),
                _ => None,
            };
            if let Some(tok) = single {
                push(tok, 1, &mut i, &mut col);
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s
                    .parse::<u64>()
                    .map_err(|_| err(l0, c0, format!("constant `{s}` out of range")))?;
                col += i - start;
                out.push(Token { tok: Tok::Num(n), line: l0, column: c0 });
            } else if c.is_ascii_alphabetic() {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                col += i - start;
                let s: String = chars[start..i].iter().collect();
                out.push(Token { tok: Tok::Ident(s), line: l0, column: c0 });
            } else {
                return Err(err(l0, c0, format!("unexpected character `{c}`")));
            }
        }
    }
    out.push(Token { tok: Tok::Eof, line, column: col });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ChainOp {
    Par,
    Choice,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let t = &self.toks[self.pos];
        Err(ParseError { line: t.line, column: t.column, message: message.into() })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn chain(
        &mut self,
        par: Tok,
        choice: Tok,
        sym: Tok,
        what: &str,
        next: fn(&mut Self) -> Result<Formula, ParseError>,
    ) -> Result<Formula, ParseError> {
        let first = next(self)?;
        let mut items = vec![first];
        let mut kind: Option<ChainOp> = None;
        loop {
            let t = self.peek().clone();
            let op = if t == par {
                ChainOp::Par
            } else if t == choice || t == sym {
                ChainOp::Choice
            } else {
                break;
            };
            if kind.is_some_and(|k| k != op) {
                return self.error(format!("mixing parallel and choice {what} requires parentheses"));
            }
            kind = Some(op);
            self.bump();
            items.push(next(self)?);
        }
        Ok(match (kind, items.len()) {
            (None, _) => items.pop().expect("one item"),
            (Some(ChainOp::Par), _) if par == Tok::And => Formula::And(items),
            (Some(ChainOp::Par), _) => Formula::Or(items),
            (Some(ChainOp::Choice), _) if par == Tok::And => Formula::ChoiceAnd(items),
            (Some(ChainOp::Choice), _) => Formula::ChoiceOr(items),
        })
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        self.chain(Tok::Or, Tok::COr, Tok::Sqcup, "disjunction", Self::conjunction)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        self.chain(Tok::And, Tok::CAnd, Tok::Sqcap, "conjunction", Self::unary)
    }

    fn quantified(&mut self, q: Tok) -> Result<Formula, ParseError> {
        let var = match self.bump() {
            Tok::Ident(v) if is_variable_name(&v) => v,
            _ => {
                self.pos -= 1;
                return self.error("expected a variable after quantifier");
            }
        };
        if *self.peek() == Tok::Dot {
            self.bump();
        }
        let body = Box::new(self.formula()?);
        Ok(match q {
            Tok::Forall => Formula::Forall(var, body),
            Tok::Exists => Formula::Exists(var, body),
            Tok::CForall | Tok::Sqcap => Formula::ChoiceForall(var, body),
            _ => Formula::ChoiceExists(var, body),
        })
    }

    fn is_var_token(&self, k: usize) -> bool {
        matches!(self.peek_at(k), Tok::Ident(v) if is_variable_name(v))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Forall | Tok::Exists | Tok::CForall | Tok::CExists => {
                let q = self.bump();
                self.quantified(q)
            }
            Tok::Sqcap | Tok::Sqcup if self.is_var_token(1) => {
                let q = self.bump();
                self.quantified(q)
            }
            Tok::Ident(ref s) if (s == "A" || s == "E") && self.is_var_token(1) => {
                let q = if s == "A" { Tok::Forall } else { Tok::Exists };
                self.bump();
                self.quantified(q)
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(_) => self.atom(),
            Tok::Eof => self.error("unexpected end of input"),
            _ => self.error("expected a formula"),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let name = match self.bump() {
            Tok::Ident(s) => s,
            _ => unreachable!(),
        };
        if is_variable_name(&name) {
            self.pos -= 1;
            return self.error(format!("variable `{name}` used where a formula is expected"));
        }
        let upper = name.starts_with(|c: char| c.is_ascii_uppercase());
        let letter = if name == "T" || name == "F" {
            if *self.peek() == Tok::LParen || *self.peek() == Tok::Hash {
                return self.error("logical letters take no arguments");
            }
            return Ok(Formula::atom(if name == "T" { Letter::Top } else { Letter::Bottom }, vec![]));
        } else if *self.peek() == Tok::Hash {
            if !upper {
                return self.error("hybrid letters need a general (uppercase) first component");
            }
            self.bump();
            let elem = match self.bump() {
                Tok::Ident(e)
                    if e.starts_with(|c: char| c.is_ascii_lowercase()) && !is_variable_name(&e) =>
                {
                    e
                }
                _ => {
                    self.pos -= 1;
                    return self.error("expected an elementary letter after `#`");
                }
            };
            Letter::Hybrid { general: name, elementary: elem }
        } else if upper {
            Letter::General(name)
        } else {
            Letter::Elementary(name)
        };
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            loop {
                match self.bump() {
                    Tok::Num(n) => args.push(Term::Const(n)),
                    Tok::Ident(v) if is_variable_name(&v) => args.push(Term::Var(v)),
                    _ => {
                        self.pos -= 1;
                        return self.error("expected a term (variable or constant)");
                    }
                }
                match self.bump() {
                    Tok::Comma => continue,
                    Tok::RParen => break,
                    _ => {
                        self.pos -= 1;
                        return self.error("expected `,` or `)`");
                    }
                }
            }
        }
        Ok(Formula::Atom(Atom { letter, args }))
    }
}

/// Parse a (hyper)formula.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.error("unexpected trailing input");
    }
    Ok(f)
}
