use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::schema::{all_matches, match_axiom, Schema, SystemId};
use crate::formula::{Formula, ProofTerm};

/// How a line is justified. Line references are 0-based indices of
/// earlier lines.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Justification {
    Hypothesis,
    /// An axiom instance. When the schema is omitted the checker searches
    /// the system's list.
    Axiom {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        schema: Option<Schema>,
    },
    /// A member `c:A` of the given constant specification.
    Cs,
    /// `minor` proves `A`, `major` proves `A -> B`.
    ModusPonens { minor: usize, major: usize },
    BoxNec { premise: usize },
    /// `c:A` from an axiom line `A`.
    AxiomNec { premise: usize },
}

impl Justification {
    pub fn axiom(schema: Schema) -> Self {
        Justification::Axiom { schema: Some(schema) }
    }

    pub fn premises(&self) -> Vec<usize> {
        match *self {
            Justification::ModusPonens { minor, major } => vec![minor, major],
            Justification::BoxNec { premise } | Justification::AxiomNec { premise } => vec![premise],
            _ => vec![],
        }
    }

    pub(crate) fn map_premises(&self, f: impl Fn(usize) -> usize) -> Self {
        match *self {
            Justification::ModusPonens { minor, major } => {
                Justification::ModusPonens { minor: f(minor), major: f(major) }
            }
            Justification::BoxNec { premise } => Justification::BoxNec { premise: f(premise) },
            Justification::AxiomNec { premise } => Justification::AxiomNec { premise: f(premise) },
            ref other => other.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub formula: Formula,
    pub just: Justification,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Derivation {
    pub lines: Vec<Line>,
}

impl Derivation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, formula: Formula, just: Justification) -> usize {
        self.lines.push(Line { formula, just });
        self.lines.len() - 1
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }

    pub fn hypotheses(&self) -> Vec<&Formula> {
        self.lines
            .iter()
            .filter(|l| l.just == Justification::Hypothesis)
            .map(|l| &l.formula)
            .collect()
    }

    /// Keeps only the lines the line `target` depends on, renumbered, with
    /// `target` last.
    pub fn pruned(&self, target: usize) -> Derivation {
        let mut needed = vec![false; target + 1];
        needed[target] = true;
        for i in (0..=target).rev() {
            if needed[i] {
                for p in self.lines[i].just.premises() {
                    needed[p] = true;
                }
            }
        }
        let mut map = vec![usize::MAX; target + 1];
        let mut out = Derivation::new();
        for i in 0..=target {
            if needed[i] {
                let l = &self.lines[i];
                map[i] = out.push(l.formula.clone(), l.just.map_premises(|p| map[p]));
            }
        }
        out
    }

    /// Applies a proof-variable substitution to every line.
    pub fn subst_term_vars(&mut self, map: &dyn Fn(&str) -> Option<ProofTerm>) {
        for l in &mut self.lines {
            if let Some(f) = l.formula.subst_term_vars_opt(map) {
                l.formula = f;
            }
        }
    }
}

/// A set of `c:A` facts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstantSpec {
    entries: BTreeSet<(Arc<str>, Formula)>,
}

impl ConstantSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, constant: &str, formula: Formula) -> bool {
        self.entries.insert((constant.into(), formula))
    }

    pub fn contains(&self, constant: &str, formula: &Formula) -> bool {
        self.entries.contains(&(Arc::<str>::from(constant), formula.clone()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Formula)> {
        self.entries.iter().map(|(c, f)| (&**c, f))
    }

    pub fn extend(&mut self, other: &ConstantSpec) {
        self.entries.extend(other.entries.iter().cloned());
    }

    pub fn subst_term_vars(&mut self, map: &dyn Fn(&str) -> Option<ProofTerm>) {
        self.entries = std::mem::take(&mut self.entries)
            .into_iter()
            .map(|(c, f)| (c, f.subst_term_vars(map)))
            .collect();
    }
}

impl FromIterator<(String, Formula)> for ConstantSpec {
    fn from_iter<I: IntoIterator<Item = (String, Formula)>>(iter: I) -> Self {
        let mut cs = ConstantSpec::new();
        for (c, f) in iter {
            cs.insert(&c, f);
        }
        cs
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CsError {
    #[error("`{constant}:{formula}` is not an axiom instance of {system}")]
    NotAnAxiom { constant: String, formula: String, system: SystemId },
    #[error("constant `{0}` specifies more than one formula")]
    NotInjective(String),
}

/// Every offending entry, or `Ok` when each formula is an axiom instance of
/// `system`.
pub fn validate_cs(cs: &ConstantSpec, system: SystemId) -> Result<(), Vec<CsError>> {
    let errs: Vec<CsError> = cs
        .iter()
        .filter(|(_, f)| match_axiom(f, system).is_none())
        .map(|(c, f)| CsError::NotAnAxiom { constant: c.into(), formula: f.to_string(), system })
        .collect();
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

/// Whether constants come from the axiom necessitation rule or from a
/// fixed specification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CsMode {
    /// Axiom necessitation is a rule; `Cs` lines are not allowed.
    Rule,
    /// The system minus axiom necessitation plus the given facts as axioms.
    Given(ConstantSpec),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckOptions {
    /// Reject a derivation in which one constant specifies two formulas.
    pub injective_constants: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LineError {
    #[error("line {0} is referenced before it is derived")]
    ForwardReference(usize),
    #[error("formula is outside the language of {0}: `{1}` is not allowed")]
    Language(SystemId, &'static str),
    #[error("no schema matches")]
    NoSchema,
    #[error("not an instance of {0}")]
    WrongSchema(Schema),
    #[error("schema {0} is not part of {1}")]
    SchemaNotInSystem(Schema, SystemId),
    #[error("line {major} is not an implication with antecedent line {minor}")]
    MpMismatch { minor: usize, major: usize },
    #[error("conclusion does not follow from the premises")]
    WrongConclusion,
    #[error("{0} has no box necessitation")]
    NoBoxNec(SystemId),
    #[error("box necessitation of a line that depends on hypotheses {0:?}")]
    BoxNecUnderHypotheses(Vec<usize>),
    #[error("axiom necessitation is not available here")]
    NoAxiomNec,
    #[error("premise of axiom necessitation must be an axiom line")]
    AxiomNecPremise,
    #[error("formula is not of the form c:A with c a constant")]
    NotConstantEvidence,
    #[error("not a member of the constant specification")]
    NotInCs,
    #[error("constant specification lines are not available here")]
    NoCsLines,
    #[error("constant `{0}` already specifies another formula")]
    NotInjective(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}: {error}")]
pub struct CheckError {
    /// 0-based line index.
    pub line: usize,
    pub error: LineError,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub conclusion: Option<Formula>,
    /// The `c:A` facts the derivation generates or uses.
    pub used_cs: ConstantSpec,
    /// Schema of each axiom line, with all alternatives.
    pub schemas: BTreeMap<usize, Vec<Schema>>,
    /// Hypothesis lines each line depends on.
    pub depends: Vec<BTreeSet<usize>>,
}

pub fn check_derivation(d: &Derivation, system: SystemId, mode: &CsMode) -> Result<Verdict, CheckError> {
    check_derivation_with(d, system, mode, CheckOptions::default())
}

pub fn check_derivation_with(
    d: &Derivation,
    system: SystemId,
    mode: &CsMode,
    opts: CheckOptions,
) -> Result<Verdict, CheckError> {
    let mut verdict = Verdict {
        conclusion: d.conclusion().cloned(),
        used_cs: ConstantSpec::new(),
        schemas: BTreeMap::new(),
        depends: Vec::with_capacity(d.len()),
    };
    let mut owner: BTreeMap<Arc<str>, Formula> = BTreeMap::new();
    for (i, line) in d.lines.iter().enumerate() {
        let err = |error| CheckError { line: i, error };
        for p in line.just.premises() {
            if p >= i {
                return Err(err(LineError::ForwardReference(p)));
            }
        }
        if let Some(c) = line.formula.language_violation(system.language()) {
            return Err(err(LineError::Language(system, c)));
        }
        let f = &line.formula;
        let deps = match &line.just {
            Justification::Hypothesis => BTreeSet::from([i]),
            Justification::Axiom { schema } => {
                let all = all_matches(f, system);
                match schema {
                    Some(s) if !system.has_schema(*s) => {
                        return Err(err(LineError::SchemaNotInSystem(*s, system)))
                    }
                    Some(s) if !all.contains(s) => return Err(err(LineError::WrongSchema(*s))),
                    _ if all.is_empty() => return Err(err(LineError::NoSchema)),
                    _ => {}
                }
                verdict.schemas.insert(i, all);
                BTreeSet::new()
            }
            Justification::Cs => {
                let CsMode::Given(cs) = mode else {
                    return Err(err(LineError::NoCsLines));
                };
                let Formula::Evid(t, a) = f else {
                    return Err(err(LineError::NotConstantEvidence));
                };
                let ProofTerm::Const(c) = &**t else {
                    return Err(err(LineError::NotConstantEvidence));
                };
                if !cs.contains(c, a) {
                    return Err(err(LineError::NotInCs));
                }
                record(&mut owner, &mut verdict.used_cs, c, a, opts).map_err(err)?;
                BTreeSet::new()
            }
            Justification::ModusPonens { minor, major } => {
                let (a, b) = (&d.lines[*minor].formula, &d.lines[*major].formula);
                match b {
                    Formula::Implies(x, y) if **x == *a => {
                        if **y != *f {
                            return Err(err(LineError::WrongConclusion));
                        }
                    }
                    _ => return Err(err(LineError::MpMismatch { minor: *minor, major: *major })),
                }
                &verdict.depends[*minor] | &verdict.depends[*major]
            }
            Justification::BoxNec { premise } => {
                if !system.has_box() {
                    return Err(err(LineError::NoBoxNec(system)));
                }
                let deps = &verdict.depends[*premise];
                if !deps.is_empty() {
                    return Err(err(LineError::BoxNecUnderHypotheses(deps.iter().copied().collect())));
                }
                if *f != Formula::boxed(d.lines[*premise].formula.clone()) {
                    return Err(err(LineError::WrongConclusion));
                }
                BTreeSet::new()
            }
            Justification::AxiomNec { premise } => {
                if !system.is_explicit() || matches!(mode, CsMode::Given(_)) {
                    return Err(err(LineError::NoAxiomNec));
                }
                if !matches!(d.lines[*premise].just, Justification::Axiom { .. }) {
                    return Err(err(LineError::AxiomNecPremise));
                }
                let Formula::Evid(t, a) = f else {
                    return Err(err(LineError::NotConstantEvidence));
                };
                let ProofTerm::Const(c) = &**t else {
                    return Err(err(LineError::NotConstantEvidence));
                };
                if **a != d.lines[*premise].formula {
                    return Err(err(LineError::WrongConclusion));
                }
                record(&mut owner, &mut verdict.used_cs, c, a, opts).map_err(err)?;
                BTreeSet::new()
            }
        };
        verdict.depends.push(deps);
    }
    Ok(verdict)
}

fn record(
    owner: &mut BTreeMap<Arc<str>, Formula>,
    used: &mut ConstantSpec,
    c: &Arc<str>,
    a: &Formula,
    opts: CheckOptions,
) -> Result<(), LineError> {
    if opts.injective_constants {
        if let Some(prev) = owner.get(c) {
            if prev != a {
                return Err(LineError::NotInjective(c.to_string()));
            }
        }
        owner.insert(c.clone(), a.clone());
    }
    used.insert(c, a.clone());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, Language};

    fn iel(s: &str) -> Formula {
        parse(s, Language::Iel).unwrap()
    }

    fn exp(s: &str) -> Formula {
        parse(s, Language::Explicit).unwrap()
    }

    #[test]
    fn co_reflection_by_mp() {
        let mut d = Derivation::new();
        d.push(iel("p"), Justification::Hypothesis);
        d.push(iel("p -> K p"), Justification::axiom(Schema::CoReflection));
        d.push(iel("K p"), Justification::ModusPonens { minor: 0, major: 1 });
        let v = check_derivation(&d, SystemId::IelMinus, &CsMode::Rule).unwrap();
        assert_eq!(v.conclusion, Some(iel("K p")));
        assert_eq!(v.depends[2], BTreeSet::from([0]));
    }

    #[test]
    fn reflection_is_no_axiom() {
        let mut d = Derivation::new();
        d.push(iel("K p -> p"), Justification::Axiom { schema: None });
        let e = check_derivation(&d, SystemId::Iel, &CsMode::Rule).unwrap_err();
        assert_eq!(e.error, LineError::NoSchema);
        assert_eq!(e.error.to_string(), "no schema matches");
    }

    fn proof_checker_example() -> Derivation {
        let mut d = Derivation::new();
        d.push(exp("p -> q -> p"), Justification::axiom(Schema::K));
        d.push(exp("c:(p -> q -> p)"), Justification::AxiomNec { premise: 0 });
        d.push(
            exp("c:(p -> q -> p) -> !c:c:(p -> q -> p)"),
            Justification::axiom(Schema::ProofChecker),
        );
        d.push(exp("!c:c:(p -> q -> p)"), Justification::ModusPonens { minor: 1, major: 2 });
        d
    }

    #[test]
    fn axiom_necessitation_reports_cs() {
        let v = check_derivation(&proof_checker_example(), SystemId::LpvMinus, &CsMode::Rule).unwrap();
        let expect: ConstantSpec = [("c".to_string(), exp("p -> q -> p"))].into_iter().collect();
        assert_eq!(v.used_cs, expect);
    }

    #[test]
    fn cs_mode_forbids_axiom_necessitation() {
        let cs: ConstantSpec = [("c".to_string(), exp("p -> q -> p"))].into_iter().collect();
        let e = check_derivation(&proof_checker_example(), SystemId::LpvMinus, &CsMode::Given(cs.clone()))
            .unwrap_err();
        assert_eq!(e.line, 1);
        let mut d = proof_checker_example();
        d.lines[1].just = Justification::Cs;
        assert!(check_derivation(&d, SystemId::LpvMinus, &CsMode::Given(cs)).is_ok());
        assert_eq!(
            check_derivation(&d, SystemId::LpvMinus, &CsMode::Rule).unwrap_err().error,
            LineError::NoCsLines
        );
    }

    #[test]
    fn box_nec_needs_closed_premise() {
        let m = |s: &str| parse(s, Language::Modal).unwrap();
        let mut d = Derivation::new();
        d.push(m("p"), Justification::Hypothesis);
        d.push(m("[]p"), Justification::BoxNec { premise: 0 });
        let e = check_derivation(&d, SystemId::S4v, &CsMode::Rule).unwrap_err();
        assert!(matches!(e.error, LineError::BoxNecUnderHypotheses(_)));
    }

    #[test]
    fn validate_cs_examples() {
        let good: ConstantSpec = [("c".to_string(), exp("p -> q -> p"))].into_iter().collect();
        assert!(validate_cs(&good, SystemId::LpvMinus).is_ok());
        let bad: ConstantSpec = [("c".to_string(), exp("V p -> p"))].into_iter().collect();
        assert_eq!(validate_cs(&bad, SystemId::LpvMinus).unwrap_err().len(), 1);
        assert!(validate_cs(&ConstantSpec::new(), SystemId::Lpv).is_ok());
    }

    #[test]
    fn injective_mode() {
        let mut d = Derivation::new();
        d.push(exp("p -> q -> p"), Justification::axiom(Schema::K));
        d.push(exp("c:(p -> q -> p)"), Justification::AxiomNec { premise: 0 });
        d.push(exp("_|_ -> p"), Justification::axiom(Schema::ExFalso));
        d.push(exp("c:(_|_ -> p)"), Justification::AxiomNec { premise: 2 });
        assert!(check_derivation(&d, SystemId::Lp, &CsMode::Rule).is_ok());
        let opts = CheckOptions { injective_constants: true };
        let e = check_derivation_with(&d, SystemId::Lp, &CsMode::Rule, opts).unwrap_err();
        assert_eq!(e.line, 3);
    }
}
