//! Proof files.
//!
//! ```json
//! {"system": "CL4",
//!  "steps": [{"id": 1, "formula": "p(z) -> p(z)", "rule": "A", "premises": [], "params": {}},
//!            {"id": 2, "formula": "P(z) -> P(z)", "rule": "C", "premises": [1],
//!             "params": {"pos": "2.", "neg": "1.", "elem": "p"}}]}
//! ```
//!
//! `system` is `CL4` or `CL4o`; `rule` is one of `A`, `B1`, `B2`, `C`, `Co`
//! (`C°` is accepted on input). Parameters: `addr` and `index` for B1, `addr`
//! and `term` for B2, `pos`, `neg` and `elem` for C, `hybrid` (`P#q`) for Co.

use super::{Proof, Rule, Step, System};
use crate::syntax::{is_variable_name, parse, Address, Term};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProofFormatError {
    #[error("malformed proof document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("step {step}: {message}")]
    Field { step: usize, message: String },
}

#[derive(Serialize, Deserialize, Default, Clone)]
struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    addr: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    term: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pos: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    neg: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elem: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hybrid: Option<String>,
}

#[derive(Serialize, Deserialize, Clone)]
struct StepDoc {
    id: usize,
    formula: String,
    rule: String,
    #[serde(default)]
    premises: Vec<usize>,
    #[serde(default)]
    params: Params,
}

#[derive(Serialize, Deserialize, Clone)]
struct ProofDoc {
    system: String,
    steps: Vec<StepDoc>,
}

fn parse_term(s: &str) -> Option<Term> {
    if !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) {
        s.parse().ok().map(Term::Const)
    } else if is_variable_name(s) {
        Some(Term::var(s))
    } else {
        None
    }
}

fn step_from_doc(d: StepDoc) -> Result<Step, ProofFormatError> {
    let err = |message: String| ProofFormatError::Field { step: d.id, message };
    let formula = parse(&d.formula).map_err(|e| err(format!("formula: {e}")))?;
    let p = &d.params;
    let addr = |field: &Option<String>, name: &str| -> Result<Address, ProofFormatError> {
        let s = field.as_ref().ok_or_else(|| err(format!("missing parameter {name}")))?;
        s.parse::<Address>().map_err(|_| err(format!("bad address {s:?} in {name}")))
    };
    let rule = match d.rule.as_str() {
        "A" => Rule::A,
        "B1" => Rule::B1 {
            addr: addr(&p.addr, "addr")?,
            index: p.index.ok_or_else(|| err("missing parameter index".into()))?,
        },
        "B2" => {
            let t = p.term.as_deref().ok_or_else(|| err("missing parameter term".into()))?;
            Rule::B2 { addr: addr(&p.addr, "addr")?, term: parse_term(t).ok_or_else(|| err(format!("bad term {t:?}")))? }
        }
        "C" => Rule::C {
            pos: addr(&p.pos, "pos")?,
            neg: addr(&p.neg, "neg")?,
            elem: p.elem.clone().ok_or_else(|| err("missing parameter elem".into()))?,
        },
        "Co" | "C°" | "C0" => {
            let h = p.hybrid.as_deref().ok_or_else(|| err("missing parameter hybrid".into()))?;
            let (g, e) = h.split_once('#').ok_or_else(|| err(format!("bad hybrid letter {h:?}")))?;
            Rule::CHybrid { general: g.to_string(), elementary: e.to_string() }
        }
        other => return Err(err(format!("unknown rule {other:?}"))),
    };
    Ok(Step { id: d.id, formula, rule, premises: d.premises })
}

impl TryFrom<ProofDoc> for Proof {
    type Error = ProofFormatError;

    fn try_from(d: ProofDoc) -> Result<Proof, ProofFormatError> {
        let system = match d.system.as_str() {
            "CL4" => System::Cl4,
            "CL4o" | "CL4°" => System::Cl4o,
            other => {
                return Err(ProofFormatError::Field { step: 0, message: format!("unknown system {other:?}") })
            }
        };
        let steps = d.steps.into_iter().map(step_from_doc).collect::<Result<_, _>>()?;
        Ok(Proof { system, steps })
    }
}

impl From<&Proof> for ProofDoc {
    fn from(p: &Proof) -> ProofDoc {
        let steps = p
            .steps
            .iter()
            .map(|s| {
                let mut params = Params::default();
                match &s.rule {
                    Rule::A => {}
                    Rule::B1 { addr, index } => {
                        params.addr = Some(addr.to_string());
                        params.index = Some(*index);
                    }
                    Rule::B2 { addr, term } => {
                        params.addr = Some(addr.to_string());
                        params.term = Some(term.to_string());
                    }
                    Rule::C { pos, neg, elem } => {
                        params.pos = Some(pos.to_string());
                        params.neg = Some(neg.to_string());
                        params.elem = Some(elem.clone());
                    }
                    Rule::CHybrid { general, elementary } => {
                        params.hybrid = Some(format!("{general}#{elementary}"));
                    }
                }
                StepDoc {
                    id: s.id,
                    formula: s.formula.to_string(),
                    rule: s.rule.tag().to_string(),
                    premises: s.premises.clone(),
                    params,
                }
            })
            .collect();
        ProofDoc { system: p.system.to_string(), steps }
    }
}

impl Serialize for Proof {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ProofDoc::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Proof {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Proof, D::Error> {
        let doc = ProofDoc::deserialize(d)?;
        Proof::try_from(doc).map_err(serde::de::Error::custom)
    }
}

impl Proof {
    pub fn from_json(text: &str) -> Result<Proof, ProofFormatError> {
        let doc: ProofDoc = serde_json::from_str(text)?;
        Proof::try_from(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ProofDoc::from(self)).expect("serializable")
    }
}
