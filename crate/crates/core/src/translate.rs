//! The Gödel translation into the modal language and the forgetful
//! projection out of the explicit language.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Formula, Language, Position};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("input is not in the {expected} language: `{construct}` is not allowed")]
    NotInLanguage { expected: Language, construct: &'static str },
}

fn require(f: &Formula, lang: Language) -> Result<(), TranslateError> {
    match f.language_violation(lang) {
        None => Ok(()),
        Some(construct) => Err(TranslateError::NotInLanguage { expected: lang, construct }),
    }
}

/// Which defining equation of the translation produced a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrClause {
    /// `tr(p) = []p`
    Atom,
    /// `tr(_|_) = []_|_`
    Bottom,
    /// `tr(A -> _|_) = [](tr A -> _|_)`
    Negation,
    /// `tr(A & B) = [](tr A & tr B)`
    And,
    /// `tr(A | B) = [](tr A | tr B)`
    Or,
    /// `tr(A -> B) = [](tr A -> tr B)`
    Implies,
    /// `tr(K A) = []V tr A`
    Know,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    /// Node of the source formula.
    pub source: Position,
    /// The outer box emitted for it in the result.
    pub target: Position,
    pub clause: TrClause,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationTrace {
    pub source: Formula,
    pub result: Formula,
    /// One step per translated source node, in pre-order.
    pub steps: Vec<TraceStep>,
}

pub fn godel_tr(f: &Formula) -> Result<Formula, TranslateError> {
    Ok(godel_tr_traced(f)?.result)
}

pub fn godel_tr_traced(f: &Formula) -> Result<TranslationTrace, TranslateError> {
    require(f, Language::Iel)?;
    let mut steps = Vec::new();
    let result = tr(f, &mut Vec::new(), &mut Vec::new(), &mut steps);
    Ok(TranslationTrace { source: f.clone(), result, steps })
}

fn tr(f: &Formula, src: &mut Vec<u8>, dst: &mut Vec<u8>, steps: &mut Vec<TraceStep>) -> Formula {
    let clause = match f {
        Formula::Atom(_) => TrClause::Atom,
        Formula::Bottom => TrClause::Bottom,
        Formula::Implies(_, b) if **b == Formula::Bottom => TrClause::Negation,
        Formula::And(..) => TrClause::And,
        Formula::Or(..) => TrClause::Or,
        Formula::Implies(..) => TrClause::Implies,
        Formula::Know(_) => TrClause::Know,
        Formula::Box(_) | Formula::Ver(_) | Formula::Evid(..) => unreachable!("checked by require"),
    };
    steps.push(TraceStep { source: Position(src.clone()), target: Position(dst.clone()), clause });
    let mut sub = |i: u8, path: &[u8], child: &Formula, steps: &mut Vec<TraceStep>| {
        src.push(i);
        let mark = dst.len();
        dst.extend_from_slice(path);
        let out = tr(child, src, dst, steps);
        dst.truncate(mark);
        src.pop();
        out
    };
    let body = match f {
        Formula::Atom(_) | Formula::Bottom => f.clone(),
        Formula::Implies(a, _) if clause == TrClause::Negation => {
            Formula::not(sub(0, &[0, 0], a, steps))
        }
        Formula::And(a, b) => {
            let l = sub(0, &[0, 0], a, steps);
            Formula::and(l, sub(1, &[0, 1], b, steps))
        }
        Formula::Or(a, b) => {
            let l = sub(0, &[0, 0], a, steps);
            Formula::or(l, sub(1, &[0, 1], b, steps))
        }
        Formula::Implies(a, b) => {
            let l = sub(0, &[0, 0], a, steps);
            Formula::implies(l, sub(1, &[0, 1], b, steps))
        }
        Formula::Know(a) => Formula::ver(sub(0, &[0, 0], a, steps)),
        _ => unreachable!(),
    };
    Formula::boxed(body)
}

impl TranslationTrace {
    /// Rebuilds the result from the source by applying the logged clauses
    /// in order. Returns `None` if a step does not fit the source node it
    /// names.
    pub fn replay(&self) -> Option<Formula> {
        let mut it = self.steps.iter();
        let out = replay_node(&self.source, &[], &mut it)?;
        it.next().is_none().then_some(out)
    }
}

fn replay_node<'a>(
    f: &Formula,
    pos: &[u8],
    it: &mut impl Iterator<Item = &'a TraceStep>,
) -> Option<Formula> {
    let step = it.next()?;
    if step.source.0 != pos {
        return None;
    }
    let child = |i: u8, c: &Formula, it: &mut _| {
        let mut p = pos.to_vec();
        p.push(i);
        replay_node(c, &p, it)
    };
    let body = match (step.clause, f) {
        (TrClause::Atom, Formula::Atom(_)) | (TrClause::Bottom, Formula::Bottom) => f.clone(),
        (TrClause::Negation, Formula::Implies(a, b)) if **b == Formula::Bottom => {
            Formula::not(child(0, a, it)?)
        }
        (TrClause::And, Formula::And(a, b)) => {
            let l = child(0, a, it)?;
            Formula::and(l, child(1, b, it)?)
        }
        (TrClause::Or, Formula::Or(a, b)) => {
            let l = child(0, a, it)?;
            Formula::or(l, child(1, b, it)?)
        }
        (TrClause::Implies, Formula::Implies(a, b)) if **b != Formula::Bottom => {
            let l = child(0, a, it)?;
            Formula::implies(l, child(1, b, it)?)
        }
        (TrClause::Know, Formula::Know(a)) => Formula::ver(child(0, a, it)?),
        _ => return None,
    };
    Some(Formula::boxed(body))
}

/// Replaces every `t:A` by `[]A`.
pub fn forgetful_projection(f: &Formula) -> Result<Formula, TranslateError> {
    require(f, Language::Explicit)?;
    Ok(project(f))
}

pub(crate) fn project(f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) | Formula::Bottom => f.clone(),
        Formula::And(a, b) => Formula::and(project(a), project(b)),
        Formula::Or(a, b) => Formula::or(project(a), project(b)),
        Formula::Implies(a, b) => Formula::implies(project(a), project(b)),
        Formula::Know(a) => Formula::know(project(a)),
        Formula::Box(a) | Formula::Evid(_, a) => Formula::boxed(project(a)),
        Formula::Ver(a) => Formula::ver(project(a)),
    }
}
