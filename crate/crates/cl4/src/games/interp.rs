//! Interpretations and valuations.
//!
//! ```json
//! {"universe": 2,
//!  "elementary": {"p(0)": true, "q": true},
//!  "general": {"P": {"params": ["x"], "body": "p(x) !\\/ ~p(x)"}}}
//! ```
//!
//! Elementary atoms missing from the table are false. A general letter is
//! defined by a blind-quantifier-free formula over elementary letters whose
//! free variables are among its parameters. Hybrid letters are played as
//! their general component.

use super::GameError;
use crate::syntax::{is_variable_name, parse, Atom, Formula, Letter, Term};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Definition {
    pub params: Vec<String>,
    pub body: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interpretation {
    pub universe: u64,
    elementary: BTreeMap<String, bool>,
    general: BTreeMap<String, Definition>,
}

/// Variables to constants; unmapped variables read as 0.
pub type Valuation = BTreeMap<String, u64>;

impl Interpretation {
    pub fn new(universe: u64) -> Interpretation {
        assert!(universe >= 1, "the universe is nonempty");
        Interpretation { universe, elementary: BTreeMap::new(), general: BTreeMap::new() }
    }

    /// Set the truth value of a ground elementary atom such as `p(0, 1)`.
    pub fn set_atom(&mut self, atom: &str, value: bool) -> Result<(), GameError> {
        let key = atom_key(atom)?;
        self.elementary.insert(key, value);
        Ok(())
    }

    pub fn define(&mut self, letter: &str, params: &[&str], body: &str) -> Result<(), GameError> {
        let body = parse(body).map_err(|e| bad(format!("body of {letter}: {e}")))?;
        self.define_formula(letter, params.iter().map(|s| s.to_string()).collect(), body)
    }

    pub fn define_formula(&mut self, letter: &str, params: Vec<String>, body: Formula) -> Result<(), GameError> {
        if !letter.starts_with(|c: char| c.is_ascii_uppercase()) {
            return Err(bad(format!("{letter} is not a general letter")));
        }
        let distinct: BTreeSet<&String> = params.iter().collect();
        if distinct.len() != params.len() || !params.iter().all(|p| is_variable_name(p)) {
            return Err(bad(format!("parameters of {letter} must be distinct variables")));
        }
        if body.has_blind_quantifiers() || body.has_general_atoms() || body.has_hybrids() {
            return Err(bad(format!("body of {letter} must be blind-free over elementary letters")));
        }
        if let Some(v) = body.free_variables().into_iter().find(|v| !params.contains(v)) {
            return Err(bad(format!("body of {letter} has free variable {v} outside its parameters")));
        }
        self.general.insert(letter.to_string(), Definition { params, body });
        Ok(())
    }

    pub fn definition(&self, letter: &str) -> Option<&Definition> {
        self.general.get(letter)
    }

    pub fn atom_value(&self, a: &Atom) -> bool {
        match &a.letter {
            Letter::Top => true,
            Letter::Bottom => false,
            _ => self.elementary.get(&a.to_string()).copied().unwrap_or(false),
        }
    }

    /// The game a general or hybrid atom stands for: its definition with the
    /// arguments substituted for the parameters.
    pub fn expand(&self, a: &Atom) -> Result<Formula, GameError> {
        let name = match &a.letter {
            Letter::General(n) => n,
            Letter::Hybrid { general, .. } => general,
            _ => return Ok(Formula::Atom(a.clone())),
        };
        let d = self.general.get(name).ok_or_else(|| GameError::Undefined(name.clone()))?;
        if d.params.len() != a.arity() {
            return Err(bad(format!("{name} has {} parameters but is used with arity {}", d.params.len(), a.arity())));
        }
        let map: BTreeMap<&str, &Term> = d.params.iter().map(String::as_str).zip(&a.args).collect();
        Ok(d.body.substitute_all(&|v| map.get(v).map(|t| (*t).clone())))
    }

    /// Is every general and hybrid letter of `f` defined with the right arity?
    pub fn covers(&self, f: &Formula) -> Result<(), GameError> {
        let mut err = None;
        f.for_each_atom(&mut |a| {
            if err.is_none() && (a.letter.is_general() || a.letter.is_hybrid()) {
                if let Err(e) = self.expand(a) {
                    err = Some(e);
                }
            }
        });
        err.map_or(Ok(()), Err)
    }

    pub fn from_json(text: &str) -> Result<Interpretation, GameError> {
        let doc: InterpDoc = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        Interpretation::try_from(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InterpDoc::from(self)).expect("serializable")
    }
}

/// Close `f` by sending every free variable to its value (0 if unmapped).
pub fn close(f: &Formula, v: &Valuation) -> Formula {
    f.substitute_all(&|x| Some(Term::Const(v.get(x).copied().unwrap_or(0))))
}

fn bad(s: String) -> GameError {
    GameError::BadInterpretation(s)
}

fn atom_key(text: &str) -> Result<String, GameError> {
    match parse(text) {
        Ok(Formula::Atom(a))
            if matches!(a.letter, Letter::Elementary(_)) && a.args.iter().all(|t| matches!(t, Term::Const(_))) =>
        {
            Ok(a.to_string())
        }
        _ => Err(bad(format!("{text:?} is not a ground elementary atom"))),
    }
}

#[derive(Serialize, Deserialize)]
struct DefinitionDoc {
    #[serde(default)]
    params: Vec<String>,
    body: String,
}

#[derive(Serialize, Deserialize)]
struct InterpDoc {
    universe: u64,
    #[serde(default)]
    elementary: BTreeMap<String, bool>,
    #[serde(default)]
    general: BTreeMap<String, DefinitionDoc>,
}

impl TryFrom<InterpDoc> for Interpretation {
    type Error = GameError;

    fn try_from(d: InterpDoc) -> Result<Interpretation, GameError> {
        if d.universe == 0 {
            return Err(bad("the universe must be nonempty".into()));
        }
        let mut i = Interpretation::new(d.universe);
        for (k, v) in d.elementary {
            i.set_atom(&k, v)?;
        }
        for (k, def) in d.general {
            let params: Vec<&str> = def.params.iter().map(String::as_str).collect();
            i.define(&k, &params, &def.body)?;
        }
        Ok(i)
    }
}

impl From<&Interpretation> for InterpDoc {
    fn from(i: &Interpretation) -> InterpDoc {
        InterpDoc {
            universe: i.universe,
            elementary: i.elementary.clone(),
            general: i
                .general
                .iter()
                .map(|(k, d)| (k.clone(), DefinitionDoc { params: d.params.clone(), body: d.body.to_string() }))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_lookup() {
        let text = r#"{"universe": 2, "elementary": {"p(0,1)": true},
                       "general": {"P": {"params": ["x"], "body": "p(x, 1) !\\/ q"}}}"#;
        let i = Interpretation::from_json(text).unwrap();
        assert_eq!(Interpretation::from_json(&i.to_json()).unwrap(), i);
        let Formula::Atom(a) = parse("p(0, 1)").unwrap() else { unreachable!() };
        assert!(i.atom_value(&a));
        let Formula::Atom(h) = parse("P#r(0)").unwrap() else { unreachable!() };
        assert_eq!(i.expand(&h).unwrap(), parse("p(0, 1) !\\/ q").unwrap());
    }

    #[test]
    fn bad_definitions_are_rejected() {
        let mut i = Interpretation::new(2);
        assert!(i.define("P", &["x"], "A y. p(y)").is_err());
        assert!(i.define("P", &["x"], "p(y)").is_err());
        assert!(i.define("P", &[], "Q").is_err());
        assert!(i.set_atom("p(x)", true).is_err());
        assert!(Interpretation::from_json(r#"{"universe": 0}"#).is_err());
    }
}
