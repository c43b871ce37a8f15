//! JSON documents for formulas, derivations and realizations.
//!
//! Formulas and sequents are stored as strings in the ASCII syntax. Line
//! references in Hilbert documents are 1-based.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::formula::{parse, parse_sequent_sides, print, print_term, Formula, Language, ParseError};
use crate::hilbert::{CheckError, ConstantSpec, Derivation, Justification, Line, LineError, SystemId, Verdict};
use crate::realize::{IelRealization, Realization};
use crate::sequent::{Node, ProveOutcome, RuleId, Sequent, SequentSystem};

#[derive(Debug, Error)]
pub enum DocError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{context}: {error}")]
    Parse { context: String, error: ParseError },
    #[error("line {0}: references must point to earlier lines (1-based)")]
    BadReference(usize),
    #[error("document names system `{0}`, which is not known here")]
    System(String),
}

fn parse_in(text: &str, lang: Language, context: impl Into<String>) -> Result<Formula, DocError> {
    parse(text, lang).map_err(|error| DocError::Parse { context: context.into(), error })
}

pub fn sequent_to_string(s: &Sequent) -> String {
    s.to_string()
}

pub fn parse_sequent(text: &str) -> Result<Sequent, DocError> {
    let (a, b) = parse_sequent_sides(text, Language::Modal)
        .map_err(|error| DocError::Parse { context: format!("sequent `{text}`"), error })?;
    Ok(Sequent::new(a, b))
}

// ---- constant specifications ------------------------------------------

#[derive(Serialize, Deserialize)]
struct CsEntry {
    constant: String,
    formula: String,
}

pub fn cs_to_json(cs: &ConstantSpec) -> Value {
    let v: Vec<CsEntry> =
        cs.iter().map(|(c, f)| CsEntry { constant: c.to_string(), formula: print(f) }).collect();
    serde_json::to_value(v).expect("serializable")
}

pub fn cs_from_json(v: &Value) -> Result<ConstantSpec, DocError> {
    let entries: Vec<CsEntry> = serde_json::from_value(v.clone())?;
    let mut cs = ConstantSpec::new();
    for e in entries {
        let f = parse_in(&e.formula, Language::Explicit, format!("constant {}", e.constant))?;
        cs.insert(&e.constant, f);
    }
    Ok(cs)
}

// ---- Hilbert derivations ----------------------------------------------

#[derive(Serialize, Deserialize)]
struct LineDoc {
    index: usize,
    formula: String,
    #[serde(flatten)]
    just: Justification,
}

#[derive(Serialize, Deserialize)]
struct HilbertDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    system: Option<SystemId>,
    lines: Vec<LineDoc>,
}

pub fn derivation_to_json(d: &Derivation, system: Option<SystemId>) -> Value {
    let lines = d
        .lines
        .iter()
        .enumerate()
        .map(|(i, l)| LineDoc { index: i + 1, formula: print(&l.formula), just: l.just.map_premises(|p| p + 1) })
        .collect();
    serde_json::to_value(HilbertDoc { system, lines }).expect("serializable")
}

/// Parses a Hilbert derivation document. Formulas are read in the language
/// of `system`, or of the system the document names.
pub fn derivation_from_json(v: &Value, system: Option<SystemId>) -> Result<(Derivation, Option<SystemId>), DocError> {
    let doc: HilbertDoc = serde_json::from_value(v.clone())?;
    let system = system.or(doc.system);
    let lang = system.map_or(Language::Explicit, SystemId::language);
    let mut d = Derivation::new();
    for (i, l) in doc.lines.into_iter().enumerate() {
        let formula = parse_in(&l.formula, lang, format!("line {}", i + 1))?;
        if l.just.premises().contains(&0) {
            return Err(DocError::BadReference(i + 1));
        }
        d.lines.push(Line { formula, just: l.just.map_premises(|p| p - 1) });
    }
    Ok((d, system))
}

pub fn verdict_to_json(v: &Result<Verdict, CheckError>) -> Value {
    match v {
        Ok(v) => json!({
            "accepted": true,
            "conclusion": v.conclusion.as_ref().map(print),
            "used_cs": cs_to_json(&v.used_cs),
        }),
        Err(e) => json!({
            "accepted": false,
            "line": e.line + 1,
            "error": one_based(&e.error).to_string(),
        }),
    }
}

/// The same error with line references counted from 1.
pub fn one_based(e: &LineError) -> LineError {
    match e {
        LineError::ForwardReference(n) => LineError::ForwardReference(n + 1),
        LineError::MpMismatch { minor, major } => LineError::MpMismatch { minor: minor + 1, major: major + 1 },
        LineError::BoxNecUnderHypotheses(v) => LineError::BoxNecUnderHypotheses(v.iter().map(|n| n + 1).collect()),
        other => other.clone(),
    }
}

// ---- sequent derivations ----------------------------------------------

#[derive(Serialize, Deserialize)]
struct NodeDoc {
    sequent: String,
    rule: RuleId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    principal: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    premises: Vec<NodeDoc>,
}

fn node_doc(n: &Node) -> NodeDoc {
    NodeDoc {
        sequent: n.sequent.to_string(),
        rule: n.rule,
        principal: n.principal,
        premises: n.premises.iter().map(node_doc).collect(),
    }
}

fn node_from_doc(d: NodeDoc) -> Result<Node, DocError> {
    Ok(Node {
        sequent: parse_sequent(&d.sequent)?,
        rule: d.rule,
        principal: d.principal,
        premises: d.premises.into_iter().map(node_from_doc).collect::<Result<_, _>>()?,
    })
}

pub fn sequent_derivation_to_json(n: &Node, system: Option<SequentSystem>) -> Value {
    let mut v = json!({ "root": node_doc(n) });
    if let Some(s) = system {
        v["system"] = json!(s);
    }
    v
}

pub fn sequent_derivation_from_json(v: &Value) -> Result<(Node, Option<SequentSystem>), DocError> {
    let system = match v.get("system") {
        Some(s) => Some(serde_json::from_value(s.clone())?),
        None => None,
    };
    let root = v.get("root").cloned().unwrap_or_else(|| v.clone());
    Ok((node_from_doc(serde_json::from_value(root)?)?, system))
}

pub fn outcome_to_json(o: &ProveOutcome, system: SequentSystem) -> Value {
    let mut v = json!({ "outcome": o.name(), "system": system });
    if let Some(n) = o.proof() {
        v["derivation"] = sequent_derivation_to_json(n, Some(system));
    }
    v
}

// ---- realizations -----------------------------------------------------

pub fn realization_to_json(r: &Realization) -> Value {
    let families: Vec<Value> = r
        .families
        .iter()
        .map(|f| {
            json!({
                "id": f.id,
                "polarity": f.polarity,
                "essential": f.essential(),
                "n_f": f.n_f(),
                "term": print_term(&r.terms[f.id]),
                "members": f.members.iter().map(|m| json!({
                    "node": m.node, "side": m.side, "index": m.index, "path": m.path,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "system": r.system,
        "formula": print(&r.formula),
        "witness": derivation_to_json(&r.witness, Some(r.system)),
        "families": families,
        "substitutions": r.substitutions.iter().map(|(v, t)| json!({
            "variable": &**v, "term": print_term(t),
        })).collect::<Vec<_>>(),
        "node_formulas": r.node_formulas.iter().map(print).collect::<Vec<_>>(),
        "cs": cs_to_json(&r.cs),
    })
}

pub fn iel_realization_to_json(r: &IelRealization, system: SystemId) -> Value {
    let mut v = realization_to_json(&r.realization);
    v["outcome"] = json!("proved");
    v["source"] = json!(print(&r.source));
    v["source_system"] = json!(system);
    v["translation"] = json!(print(&r.translation));
    v["proof"] = sequent_derivation_to_json(&r.proof, None);
    v
}

pub fn formula_to_json(f: &Formula) -> Value {
    json!({ "formula": print(f) })
}

pub fn system_from_str<T: std::str::FromStr>(s: &str) -> Result<T, DocError> {
    s.parse().map_err(|_| DocError::System(s.to_string()))
}
