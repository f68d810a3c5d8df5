//! `cl4`: decide, check, translate and play CL4 formulas from the shell.
//!
//! Exit codes: 0 provable / legal / true, 1 unprovable / illegal / false,
//! 2 unknown, 3 input error.

use clap::{Args, Parser, Subcommand};
use cl4::calculus::{check_proof, Proof};
use cl4::classical::{elementarize, is_stable, Budget, Verdict as Stability};
use cl4::decide::{decide, Decision, DecideOptions};
use cl4::games::{is_manageable, is_top_delay, is_unilegal, winner, Interpretation, Player, Run, Valuation};
use cl4::gen;
use cl4::strategy::{extract_and_play, parse_script, prepare, PlayOptions, PlayTranscript, Session, Verdict};
use cl4::syntax::{parse, Formula};
use cl4::translate::{floorify, is_good, lift, Signature};
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "cl4", version, about = "Decide, check and play CL4 formulas")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct BudgetArgs {
    /// Herbrand term depth for first-order stability checks.
    #[arg(long)]
    budget: Option<usize>,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        let mut b = Budget::default();
        if let Some(n) = self.budget {
            b.max_depth = n;
        }
        b
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide provability; prints the verdict.
    Decide(DecideArgs),
    /// Decide provability and print the proof found.
    Prove(DecideArgs),
    /// Check a proof file.
    Check {
        proof: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Print the elementarization of a formula and whether it is stable.
    Elementarize {
        formula: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Translate between CL4 formulas and their CL3 molecule form.
    #[command(subcommand)]
    Translate(Translate),
    /// Play the strategy extracted from a proof against an environment.
    Play(PlayArgs),
    /// Legality and winner of a run.
    EvalRun {
        formula: String,
        #[arg(long)]
        interp: PathBuf,
        #[arg(long)]
        run: PathBuf,
        /// Override the interpretation's universe size.
        #[arg(long)]
        universe: Option<u64>,
    },
    /// Is the first run a ⊤-delay of the second?
    Delay { delayed: PathBuf, original: PathBuf },
    /// Is a run manageable for a hyperformula?
    Manageable {
        formula: String,
        #[arg(long)]
        run: PathBuf,
    },
}

#[derive(Args)]
struct DecideArgs {
    formula: String,
    /// Admit blind quantifiers (best effort; may answer unknown).
    #[arg(long)]
    extended: bool,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Write the proof of a provable formula to this file.
    #[arg(long)]
    emit_proof: Option<PathBuf>,
    /// Print the search trace.
    #[arg(long)]
    trace: bool,
    /// Share results between branches (faster, not space-bounded).
    #[arg(long)]
    memo: bool,
}

#[derive(Subcommand)]
enum Translate {
    /// Replace every general atom by its large molecule.
    Lift { formula: String },
    /// Map independent molecules back to general atoms.
    Floor {
        formula: String,
        /// Signature JSON file, as printed by `translate lift --json`.
        #[arg(long)]
        signature: PathBuf,
    },
}

#[derive(Args)]
struct PlayArgs {
    #[arg(long)]
    proof: PathBuf,
    #[arg(long)]
    interp: PathBuf,
    /// Environment script: a JSON list of moves, `"pass"` to stop.
    #[arg(long, conflicts_with = "seed")]
    env: Option<PathBuf>,
    /// Play a random legal environment with this seed instead of a script.
    #[arg(long)]
    seed: Option<u64>,
    /// Most environment moves in a random play.
    #[arg(long, default_value_t = 4)]
    moves: usize,
    /// Override the interpretation's universe size.
    #[arg(long)]
    universe: Option<u64>,
    /// Admit blind quantifiers in the conclusion.
    #[arg(long)]
    extended: bool,
    /// Include the per-iteration snapshots in the output.
    #[arg(long)]
    trace: bool,
}

/// A diagnostic for exit code 3.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure(e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn formula(s: &str) -> Result<Formula, Failure> {
    parse(s).map_err(|e| Failure(format!("cannot parse `{s}`: {e}")))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn read_run(path: &Path) -> Result<Run, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn read_interp(path: &Path, universe: Option<u64>) -> Result<Interpretation, Failure> {
    let mut i = Interpretation::from_json(&read(path)?)?;
    if let Some(u) = universe {
        if u == 0 {
            return Err(Failure("the universe must be nonempty".into()));
        }
        i.universe = u;
    }
    Ok(i)
}

fn player(p: Player) -> &'static str {
    match p {
        Player::Top => "T",
        Player::Bottom => "B",
    }
}

fn emit(json_mode: bool, v: Value, text: String) {
    if json_mode {
        println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
    } else {
        println!("{text}");
    }
}

fn render_proof(p: &Proof) -> String {
    let mut out = format!("system: {}\n", p.system);
    for s in &p.steps {
        let prem: Vec<String> = s.premises.iter().map(usize::to_string).collect();
        out.push_str(&format!("{:>3}. {}    [{}{}]\n", s.id, s.formula, s.rule.tag(), if prem.is_empty() {
            String::new()
        } else {
            format!(" from {}", prem.join(", "))
        }));
    }
    out.trim_end().to_string()
}

fn run_decide(a: &DecideArgs, json_mode: bool, show_proof: bool) -> Outcome {
    let f = formula(&a.formula)?;
    let opts = DecideOptions { extended: a.extended, budget: a.budget.budget(), memo: a.memo, trace: a.trace, ..Default::default() };
    let report = decide(&f, &opts)?;
    if let (Some(path), Some(p)) = (&a.emit_proof, report.decision.proof()) {
        fs::write(path, p.to_json()).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    }
    let (name, code) = match &report.decision {
        Decision::Provable(_) => ("provable", 0),
        Decision::Unprovable => ("unprovable", 1),
        Decision::Unknown(_) => ("unknown", 2),
    };
    let s = &report.stats;
    let mut v = json!({
        "formula": f.to_string(),
        "verdict": name,
        "stats": {"nodes": s.nodes, "max_depth": s.max_depth, "depth_bound": s.depth_bound,
                  "c_attempts": s.c_attempts, "stability_checks": s.stability_checks, "memo_hits": s.memo_hits},
    });
    let mut text = name.to_string();
    if let Decision::Unknown(why) = &report.decision {
        v["reason"] = json!(why);
        text.push_str(&format!(": {why}"));
    }
    if let Some(p) = report.decision.proof() {
        if show_proof {
            v["proof"] = serde_json::from_str(&p.to_json()).expect("proof JSON");
            text.push('\n');
            text.push_str(&render_proof(p));
        }
    }
    if a.trace {
        v["trace"] = json!(report.trace);
        text = format!("{}\n{text}", report.trace.join("\n"));
    }
    emit(json_mode, v, text);
    Ok(code)
}

fn run_check(path: &Path, budget: &BudgetArgs, json_mode: bool) -> Outcome {
    let p = Proof::from_json(&read(path)?)?;
    match check_proof(&p, &budget.budget()) {
        Ok(()) => {
            let c = p.conclusion().map(|f| f.to_string()).unwrap_or_default();
            emit(json_mode, json!({"ok": true, "conclusion": c}), format!("ok: {c}"));
            Ok(0)
        }
        Err(e) => {
            emit(
                json_mode,
                json!({"ok": false, "step": e.step, "message": e.message}),
                format!("failure at step {}: {}", e.step, e.message),
            );
            Ok(1)
        }
    }
}

fn run_elementarize(s: &str, budget: &BudgetArgs, json_mode: bool) -> Outcome {
    let f = formula(s)?;
    let e = elementarize(&f);
    let stable = match is_stable(&f, &budget.budget()) {
        Stability::Valid => "stable",
        Stability::Invalid(_) => "unstable",
        Stability::Unknown(_) => "unknown",
    };
    emit(json_mode, json!({"formula": f.to_string(), "elementarization": e.to_string(), "stability": stable}), format!("{e}\n{stable}"));
    Ok(0)
}

fn run_translate(t: &Translate, json_mode: bool) -> Outcome {
    match t {
        Translate::Lift { formula: s } => {
            let f = formula(s)?;
            let (l, sig) = lift(&f)?;
            let good = is_good(&l, &sig).is_ok();
            let sig_json = serde_json::to_value(&sig)?;
            emit(
                json_mode,
                json!({"formula": l.to_string(), "signature": sig_json, "good": good}),
                format!("{l}\nsignature: {sig_json}"),
            );
            Ok(0)
        }
        Translate::Floor { formula: s, signature } => {
            let e = formula(s)?;
            let text = read(signature)?;
            // Accept either a bare signature or the whole `lift --json` document.
            let v: Value = serde_json::from_str(&text)?;
            let sig: Signature = serde_json::from_value(v.get("signature").cloned().unwrap_or(v))?;
            let good = is_good(&e, &sig);
            let fl = floorify(&e, &sig);
            let cond = good.as_ref().err().map(|g| g.to_string());
            let mut text = fl.to_string();
            if let Some(c) = &cond {
                text.push_str(&format!("\nnot good: {c}"));
            }
            emit(json_mode, json!({"formula": fl.to_string(), "good": good.is_ok(), "violation": cond}), text);
            Ok(0)
        }
    }
}

fn random_play(proof: &Proof, i: &Interpretation, opts: &PlayOptions, seed: u64, moves: usize) -> Result<PlayTranscript, Failure> {
    let mut rng = gen::rng(seed);
    let mut s = Session::start(proof, i, opts)?;
    for _ in 0..moves {
        if s.is_finished() {
            break;
        }
        let legal = s.environment_moves();
        // Passing is always an option.
        if legal.is_empty() || rng.gen_ratio(1, (legal.len() + 1) as u32) {
            break;
        }
        let mv = legal.choose(&mut rng).expect("nonempty").clone();
        s.env_move(&mv);
    }
    Ok(s.finish())
}

fn run_play(a: &PlayArgs, json_mode: bool) -> Outcome {
    let proof = prepare(&Proof::from_json(&read(&a.proof)?)?)?;
    let i = read_interp(&a.interp, a.universe)?;
    let opts = PlayOptions { snapshots: a.trace, allow_blind: a.extended, valuation: Valuation::new(), ..Default::default() };
    let t = match (&a.env, a.seed) {
        (Some(path), _) => extract_and_play(&proof, &i, &parse_script(&read(path)?)?, &opts)?,
        (None, Some(seed)) => random_play(&proof, &i, &opts, seed, a.moves)?,
        (None, None) => extract_and_play(&proof, &i, &Vec::new(), &opts)?,
    };
    let (win, code) = match &t.verdict {
        Verdict::MachineWins | Verdict::EnvironmentIllegal { .. } => (Some("T"), 0),
        Verdict::EnvironmentWins => (Some("B"), 1),
        Verdict::Aborted(_) => (None, 2),
    };
    let mut v = t.to_json();
    v["winner"] = json!(win);
    if !a.trace {
        v.as_object_mut().expect("object").remove("snapshots");
    }
    emit(json_mode, v, format!("{}\nwinner: {}", t.render(), win.unwrap_or("none")));
    Ok(code)
}

fn run_eval(s: &str, interp: &Path, run: &Path, universe: Option<u64>, json_mode: bool) -> Outcome {
    let f = formula(s)?;
    let i = read_interp(interp, universe)?;
    let g = read_run(run)?;
    if !is_unilegal(&f, &i, &g)? {
        let err = winner(&f, &i, &g).expect_err("illegal run");
        emit(json_mode, json!({"legal": false, "reason": err.to_string()}), format!("illegal: {err}"));
        return Ok(1);
    }
    let w = player(winner(&f, &i, &g)?);
    emit(json_mode, json!({"legal": true, "winner": w}), format!("legal\nwinner: {w}"));
    Ok(0)
}

fn run_delay(d: &Path, g: &Path, json_mode: bool) -> Outcome {
    let yes = is_top_delay(&read_run(d)?, &read_run(g)?);
    emit(json_mode, json!({"top_delay": yes}), yes.to_string());
    Ok(if yes { 0 } else { 1 })
}

fn run_manageable(s: &str, run: &Path, json_mode: bool) -> Outcome {
    let e = formula(s)?;
    let g = read_run(run)?;
    match is_manageable(&e, &g) {
        Ok(()) => {
            emit(json_mode, json!({"manageable": true}), "true".into());
            Ok(0)
        }
        Err(v) => {
            emit(
                json_mode,
                json!({"manageable": false, "clause": v.clause, "address": v.address.to_string()}),
                format!("false: {v}"),
            );
            Ok(1)
        }
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    let j = cli.json;
    match &cli.command {
        Command::Decide(a) => run_decide(a, j, false),
        Command::Prove(a) => run_decide(a, j, true),
        Command::Check { proof, budget } => run_check(proof, budget, j),
        Command::Elementarize { formula, budget } => run_elementarize(formula, budget, j),
        Command::Translate(t) => run_translate(t, j),
        Command::Play(a) => run_play(a, j),
        Command::EvalRun { formula, interp, run, universe } => run_eval(formula, interp, run, *universe, j),
        Command::Delay { delayed, original } => run_delay(delayed, original, j),
        Command::Manageable { formula, run } => run_manageable(formula, run, j),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(3);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(msg)) => {
            if cli.json {
                println!("{}", json!({"error": msg}));
            } else {
                eprintln!("error: {msg}");
            }
            ExitCode::from(3)
        }
    }
}
