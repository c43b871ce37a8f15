//! Command-line front end. `dispatch` does all the work so the binary and
//! the tests share one code path.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::doc::{self, DocError};
use crate::formula::{parse, parse_sequent_sides, print, Formula, Language};
use crate::hilbert::{check_derivation, CsMode, Derivation, SystemId};
use crate::realize::{realize, realize_iel, Realization, RealizeError};
use crate::sequent::{self, prove, Budget, Node, ProveOutcome, Sequent, SequentSystem};
use crate::translate::{forgetful_projection, godel_tr_traced};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "iel", about = "Epistemic, verification and explicit proof logics", disable_version_flag = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Logic to work in, e.g. iel, iel-minus, s4vg, s4v-minus-g, lpv, lpv-minus.
    #[arg(long, global = true)]
    system: Option<String>,
    /// Input text. `--goal` is accepted as a synonym.
    #[arg(long = "in", visible_alias = "goal", global = true, allow_hyphen_values = true)]
    input: Option<String>,
    /// Read the input from a file.
    #[arg(long, global = true)]
    file: Option<PathBuf>,
    /// Constant specification document for Hilbert checking.
    #[arg(long, global = true)]
    cs: Option<PathBuf>,
    #[arg(long, global = true)]
    max_depth: Option<usize>,
    #[arg(long, global = true)]
    max_nodes: Option<usize>,
    /// Accepted for reproducibility; every command is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a formula and report the languages it belongs to.
    Parse,
    /// Goedel translation of an IEL formula.
    Translate,
    /// Forgetful projection of an explicit formula.
    Project,
    /// Search for a cut-free sequent proof.
    Prove,
    /// Check a Hilbert or sequent derivation document.
    Check {
        #[arg(long, value_enum)]
        kind: Kind,
    },
    /// Realize a sequent proof (or prove a goal first) in LPV or LPV-minus.
    Realize,
    /// Translate, prove and realize an IEL formula.
    RealizeIel,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Hilbert,
    Sequent,
}

/// Exit code, JSON payload and the text to print.
#[derive(Debug, Clone)]
pub struct CommandOutcome {
    pub code: i32,
    pub payload: Value,
    pub text: String,
}

impl CommandOutcome {
    fn new(code: i32, payload: Value, pretty: Option<String>) -> Self {
        let text = match pretty {
            Some(t) => t,
            None => serde_json::to_string(&payload).expect("serializable"),
        };
        CommandOutcome { code, payload, text }
    }
}

struct Failure {
    code: i32,
    payload: Value,
}

fn input_error(msg: impl ToString) -> Failure {
    Failure { code: EXIT_INPUT, payload: json!({ "error": msg.to_string() }) }
}

impl From<DocError> for Failure {
    fn from(e: DocError) -> Self {
        input_error(e)
    }
}

/// Runs one command. `argv[0]` is the program name. `stdin` is consulted
/// when neither `--in` nor `--file` is given.
pub fn dispatch<S: AsRef<str>>(argv: &[S], stdin: &mut dyn FnMut() -> std::io::Result<String>) -> CommandOutcome {
    let args = argv.iter().map(|s| s.as_ref().to_string());
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let text = e.render().to_string();
                return CommandOutcome { code: EXIT_OK, payload: json!({ "help": text }), text };
            }
            let usage = usage();
            let payload = json!({ "error": e.kind().to_string(), "detail": e.render().to_string(), "usage": usage });
            return CommandOutcome::new(EXIT_INPUT, payload, None);
        }
    };
    let pretty = cli.common.pretty;
    match run(&cli, stdin) {
        Ok(o) => o,
        Err(f) => {
            let text = pretty.then(|| format!("error: {}", f.payload["error"].as_str().unwrap_or("")));
            CommandOutcome::new(f.code, f.payload, text)
        }
    }
}

pub fn usage() -> String {
    use clap::CommandFactory;
    Cli::command().render_usage().to_string()
}

fn read_input(c: &Common, stdin: &mut dyn FnMut() -> std::io::Result<String>) -> Result<String, Failure> {
    if let Some(t) = &c.input {
        return Ok(t.clone());
    }
    if let Some(p) = &c.file {
        return std::fs::read_to_string(p).map_err(|e| input_error(format!("cannot read {}: {e}", p.display())));
    }
    stdin().map_err(|e| input_error(format!("cannot read standard input: {e}")))
}

fn budget(c: &Common) -> Budget {
    let d = Budget::default();
    Budget { max_depth: c.max_depth.unwrap_or(d.max_depth), max_nodes: c.max_nodes.unwrap_or(d.max_nodes) }
}

fn sequent_system(c: &Common, from_doc: Option<SequentSystem>) -> Result<SequentSystem, Failure> {
    match &c.system {
        Some(s) => s.parse().map_err(input_error),
        None => Ok(from_doc.unwrap_or(SequentSystem::S4vG)),
    }
}

fn formula_in(text: &str, lang: Language) -> Result<Formula, Failure> {
    parse(text.trim(), lang).map_err(|e| input_error(format!("parse error: {e}")))
}

fn goal_sequent(text: &str) -> Result<Sequent, Failure> {
    let text = text.trim();
    if text.contains("=>") {
        let (a, b) = parse_sequent_sides(text, Language::Modal).map_err(|e| input_error(format!("parse error: {e}")))?;
        Ok(Sequent::new(a, b))
    } else {
        Ok(Sequent::new(vec![], vec![formula_in(text, Language::Modal)?]))
    }
}

fn json_input(text: &str) -> Result<Value, Failure> {
    serde_json::from_str(text).map_err(|e| input_error(format!("malformed document: {e}")))
}

fn run(cli: &Cli, stdin: &mut dyn FnMut() -> std::io::Result<String>) -> Result<CommandOutcome, Failure> {
    let c = &cli.common;
    let pretty = c.pretty;
    match &cli.command {
        Command::Parse => {
            let text = read_input(c, stdin)?;
            let langs: Vec<Language> = match &c.system {
                Some(s) => vec![system_language(s)?],
                None => Language::ALL.to_vec(),
            };
            let mut last = None;
            for lang in langs {
                match parse(text.trim(), lang) {
                    Ok(f) => {
                        let names: Vec<&str> = f.languages().iter().map(|l| l.name()).collect();
                        let payload = json!({
                            "formula": print(&f),
                            "languages": names,
                            "size": f.size(),
                            "depth": f.depth(),
                        });
                        let p = pretty.then(|| format!("{}\nlanguages: {}", print(&f), names.join(", ")));
                        return Ok(CommandOutcome::new(EXIT_OK, payload, p));
                    }
                    Err(e) => last = Some(e),
                }
            }
            Err(input_error(format!("parse error: {}", last.expect("at least one language"))))
        }
        Command::Translate => {
            let f = formula_in(&read_input(c, stdin)?, Language::Iel)?;
            let trace = godel_tr_traced(&f).map_err(input_error)?;
            let payload = json!({
                "source": print(&f),
                "translation": print(&trace.result),
                "trace": trace.steps,
            });
            Ok(CommandOutcome::new(EXIT_OK, payload, pretty.then(|| print(&trace.result))))
        }
        Command::Project => {
            let f = formula_in(&read_input(c, stdin)?, Language::Explicit)?;
            let p = forgetful_projection(&f).map_err(input_error)?;
            let payload = json!({ "source": print(&f), "projection": print(&p) });
            Ok(CommandOutcome::new(EXIT_OK, payload, pretty.then(|| print(&p))))
        }
        Command::Prove => {
            let goal = goal_sequent(&read_input(c, stdin)?)?;
            let system = sequent_system(c, None)?;
            let outcome = prove(&goal, system, budget(c));
            let payload = doc::outcome_to_json(&outcome, system);
            let p = pretty.then(|| match outcome.proof() {
                Some(n) => format!("proved in {system}\n{}", render_tree(n)),
                None => format!("{}: {goal}", outcome.name()),
            });
            Ok(CommandOutcome::new(outcome_code(&outcome), payload, p))
        }
        Command::Check { kind: Kind::Hilbert } => {
            let v = json_input(&read_input(c, stdin)?)?;
            let body = v.get("witness").unwrap_or(&v);
            let named = match &c.system {
                Some(s) => Some(s.parse::<SystemId>().map_err(input_error)?),
                None => None,
            };
            let (d, system) = doc::derivation_from_json(body, named)?;
            let system = system.ok_or_else(|| input_error("no system given and the document names none"))?;
            let mode = match &c.cs {
                Some(p) => {
                    let text = std::fs::read_to_string(p)
                        .map_err(|e| input_error(format!("cannot read {}: {e}", p.display())))?;
                    let cv = json_input(&text)?;
                    CsMode::Given(doc::cs_from_json(cv.get("cs").unwrap_or(&cv))?)
                }
                None => CsMode::Rule,
            };
            let verdict = check_derivation(&d, system, &mode);
            let mut payload = doc::verdict_to_json(&verdict);
            payload["system"] = json!(system);
            let code = if verdict.is_ok() { EXIT_OK } else { EXIT_REJECTED };
            let p = pretty.then(|| {
                let head = match &verdict {
                    Ok(v) => format!(
                        "accepted in {system}: {}",
                        v.conclusion.as_ref().map(print).unwrap_or_else(|| "(empty)".into())
                    ),
                    Err(e) => format!("rejected in {system} at line {}: {}", e.line + 1, doc::one_based(&e.error)),
                };
                format!("{head}\n{}", render_lines(&d))
            });
            Ok(CommandOutcome::new(code, payload, p))
        }
        Command::Check { kind: Kind::Sequent } => {
            let v = json_input(&read_input(c, stdin)?)?;
            let body = v.get("derivation").or_else(|| v.get("proof")).unwrap_or(&v);
            let (node, from_doc) = doc::sequent_derivation_from_json(body)?;
            let system = sequent_system(c, from_doc)?;
            let (code, payload, head) = match sequent::check_derivation(&node, system) {
                Ok(_) => (
                    EXIT_OK,
                    json!({ "accepted": true, "system": system, "conclusion": node.sequent.to_string() }),
                    format!("accepted in {system}: {}", node.sequent),
                ),
                Err(e) => (
                    EXIT_REJECTED,
                    json!({
                        "accepted": false,
                        "system": system,
                        "path": e.path,
                        "sequent": e.sequent.to_string(),
                        "error": e.error.to_string(),
                    }),
                    format!("rejected in {system} at {:?} ({}): {}", e.path, e.sequent, e.error),
                ),
            };
            Ok(CommandOutcome::new(code, payload, pretty.then_some(head)))
        }
        Command::Realize => {
            let text = read_input(c, stdin)?;
            let (proof, system) = if text.trim_start().starts_with('{') {
                let v = json_input(&text)?;
                if let Some(o) = v.get("outcome").and_then(Value::as_str) {
                    if o != "proved" {
                        return Err(Failure { code: EXIT_REJECTED, payload: json!({ "outcome": o }) });
                    }
                }
                let body = v.get("derivation").or_else(|| v.get("proof")).unwrap_or(&v);
                let (node, from_doc) = doc::sequent_derivation_from_json(body)?;
                (node, sequent_system(c, from_doc)?)
            } else {
                let goal = goal_sequent(&text)?;
                let system = sequent_system(c, None)?;
                match prove(&goal, system, budget(c)) {
                    ProveOutcome::Proved(n) => (n, system),
                    o => return Err(Failure { code: outcome_code(&o), payload: json!({ "outcome": o.name() }) }),
                }
            };
            match realize(&proof, system) {
                Ok(r) => {
                    let mut payload = doc::realization_to_json(&r);
                    payload["outcome"] = json!("proved");
                    Ok(CommandOutcome::new(EXIT_OK, payload, pretty.then(|| render_realization(&r))))
                }
                Err(e) => Err(realize_failure(e)),
            }
        }
        Command::RealizeIel => {
            let system = match &c.system {
                Some(s) => s.parse::<SystemId>().map_err(input_error)?,
                None => SystemId::Iel,
            };
            let iel = match system {
                SystemId::Iel => true,
                SystemId::IelMinus => false,
                other => return Err(input_error(format!("realize-iel needs iel or iel-minus, not {other}"))),
            };
            let f = formula_in(&read_input(c, stdin)?, Language::Iel)?;
            match realize_iel(&f, iel, budget(c)) {
                Ok(r) => {
                    let payload = doc::iel_realization_to_json(&r, system);
                    let p = pretty.then(|| {
                        format!(
                            "{}\ntranslation: {}\n{}",
                            print(&r.source),
                            print(&r.translation),
                            render_realization(&r.realization)
                        )
                    });
                    Ok(CommandOutcome::new(EXIT_OK, payload, p))
                }
                Err(e) => Err(realize_failure(e)),
            }
        }
    }
}

fn realize_failure(e: RealizeError) -> Failure {
    match e {
        RealizeError::NotProved(name) => {
            let code = if name == "budget-exhausted" { EXIT_BUDGET } else { EXIT_REJECTED };
            Failure { code, payload: json!({ "outcome": name }) }
        }
        RealizeError::Translate(t) => input_error(t),
        RealizeError::Sequent(s) => Failure {
            code: EXIT_REJECTED,
            payload: json!({ "outcome": "rejected", "error": s.to_string() }),
        },
        other => Failure { code: EXIT_REJECTED, payload: json!({ "outcome": "failed", "error": other.to_string() }) },
    }
}

fn outcome_code(o: &ProveOutcome) -> i32 {
    match o {
        ProveOutcome::Proved(_) => EXIT_OK,
        ProveOutcome::SaturatedUnprovable => EXIT_REJECTED,
        ProveOutcome::BudgetExhausted => EXIT_BUDGET,
    }
}

fn system_language(s: &str) -> Result<Language, Failure> {
    if let Ok(id) = s.parse::<SystemId>() {
        return Ok(id.language());
    }
    s.parse::<SequentSystem>().map(|_| Language::Modal).map_err(input_error)
}

pub fn render_tree(n: &Node) -> String {
    fn go(n: &Node, depth: usize, out: &mut String) {
        out.push_str(&format!("{}{}   [{}]\n", "  ".repeat(depth), n.sequent, rule_name(n)));
        for p in &n.premises {
            go(p, depth + 1, out);
        }
    }
    let mut out = String::new();
    go(n, 0, &mut out);
    out.pop();
    out
}

fn rule_name(n: &Node) -> String {
    serde_json::to_value(n.rule).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

pub fn render_lines(d: &Derivation) -> String {
    let v = doc::derivation_to_json(d, None);
    let width = d.len().to_string().len();
    let mut out = Vec::new();
    for l in v["lines"].as_array().into_iter().flatten() {
        let mut just = l["rule"].as_str().unwrap_or("").to_string();
        if let Some(s) = l.get("schema").and_then(Value::as_str) {
            just = format!("{just} {s}");
        }
        let refs: Vec<String> = ["minor", "major", "premise"]
            .iter()
            .filter_map(|k| l.get(*k).and_then(Value::as_u64).map(|n| n.to_string()))
            .collect();
        if !refs.is_empty() {
            just = format!("{just} {}", refs.join(","));
        }
        out.push(format!("{:>width$}. {}   [{just}]", l["index"], l["formula"].as_str().unwrap_or("")));
    }
    out.join("\n")
}

pub fn render_realization(r: &Realization) -> String {
    let mut out = format!("realized in {}: {}\n", r.system, print(&r.formula));
    for f in &r.families {
        out.push_str(&format!(
            "  family {} ({:?}{}): {}\n",
            f.id,
            f.polarity,
            if f.essential() { ", essential" } else { "" },
            crate::formula::print_term(&r.terms[f.id])
        ));
    }
    out.push_str(&render_lines(&r.witness));
    out
}
