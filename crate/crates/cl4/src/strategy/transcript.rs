//! Environment scripts and transcript output.
//!
//! A script is a JSON list of move strings; `"pass"` ends the play, as does
//! the end of the list.

use super::{PlayTranscript, Verdict};
use crate::games::show_run;
use serde_json::{json, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EnvEvent {
    Move(String),
    Pass,
}

pub type EnvironmentScript = Vec<EnvEvent>;

pub fn parse_script(text: &str) -> Result<EnvironmentScript, serde_json::Error> {
    let items: Vec<String> = serde_json::from_str(text)?;
    Ok(items.into_iter().map(|s| if s == "pass" { EnvEvent::Pass } else { EnvEvent::Move(s) }).collect())
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::MachineWins => "MachineWins",
            Verdict::EnvironmentWins => "EnvironmentWins",
            Verdict::EnvironmentIllegal { .. } => "EnvironmentIllegal",
            Verdict::Aborted(_) => "Aborted",
        }
    }
}

impl PlayTranscript {
    pub fn to_json(&self) -> Value {
        let verdict = match &self.verdict {
            Verdict::EnvironmentIllegal { mv, reason } => json!({"verdict": self.verdict.name(), "move": mv, "reason": reason}),
            Verdict::Aborted(why) => json!({"verdict": self.verdict.name(), "reason": why}),
            v => json!({"verdict": v.name()}),
        };
        json!({
            "game": self.game.to_string(),
            "run": self.final_run,
            "events": self.events.iter().map(|e| json!({
                "iteration": e.iteration,
                "step": e.step,
                "case": e.case.label(),
                "moves": e.moves,
            })).collect::<Vec<_>>(),
            "snapshots": self.snapshots.iter().map(|s| json!({
                "iteration": s.iteration,
                "inner": s.inner,
                "step": s.step,
                "E": s.e.to_string(),
                "f": s.f,
                "omega": s.omega,
                "theta_len": s.theta_len,
            })).collect::<Vec<_>>(),
            "result": verdict,
        })
    }

    pub fn render(&self) -> String {
        let mut out = format!("game: {}\n", self.game);
        for e in &self.events {
            out.push_str(&format!("  [{}] step {} {}: {}\n", e.iteration, e.step, e.case.label(), show_run(&e.moves)));
        }
        out.push_str(&format!("run: {}\n", show_run(&self.final_run)));
        out.push_str(&format!("verdict: {}", self.verdict.name()));
        match &self.verdict {
            Verdict::EnvironmentIllegal { mv, reason } => out.push_str(&format!(" ({mv}: {reason})")),
            Verdict::Aborted(why) => out.push_str(&format!(" ({why})")),
            _ => {}
        }
        out
    }
}
