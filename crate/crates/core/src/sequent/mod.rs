//! Sequent calculi for the modal verification logics.
//!
//! Sequents are pairs of multisets, kept as vectors. Structural rules are
//! explicit; the propositional rules share their context between premises.

mod prove;
mod trim;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{print, Formula, Language};

pub use prove::{prove, Budget, ProveOutcome};
pub use trim::trim;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SequentSystem {
    #[serde(rename = "s4v-minus-g")]
    S4vMinusG,
    #[serde(rename = "s4vg")]
    S4vG,
}

impl SequentSystem {
    pub fn name(self) -> &'static str {
        match self {
            SequentSystem::S4vMinusG => "s4v-minus-g",
            SequentSystem::S4vG => "s4vg",
        }
    }

    pub fn allows(self, rule: RuleId) -> bool {
        rule != RuleId::Wie || self == SequentSystem::S4vG
    }
}

impl std::str::FromStr for SequentSystem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['_', '-', '⁻'], "").as_str() {
            "s4vminusg" | "s4vming" | "s4vminus" => Ok(SequentSystem::S4vMinusG),
            "s4vg" | "s4v" => Ok(SequentSystem::S4vG),
            _ => Err(format!("unknown sequent system `{s}`")),
        }
    }
}

impl fmt::Display for SequentSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub ant: Vec<Formula>,
    pub succ: Vec<Formula>,
}

impl Sequent {
    pub fn new(ant: Vec<Formula>, succ: Vec<Formula>) -> Self {
        Sequent { ant, succ }
    }

    pub fn side(&self, s: Side) -> &Vec<Formula> {
        match s {
            Side::Ant => &self.ant,
            Side::Succ => &self.succ,
        }
    }

    fn side_mut(&mut self, s: Side) -> &mut Vec<Formula> {
        match s {
            Side::Ant => &mut self.ant,
            Side::Succ => &mut self.succ,
        }
    }

    pub fn formulas(&self) -> impl Iterator<Item = (Side, usize, &Formula)> {
        let a = self.ant.iter().enumerate().map(|(i, f)| (Side::Ant, i, f));
        let s = self.succ.iter().enumerate().map(|(i, f)| (Side::Succ, i, f));
        a.chain(s)
    }

    /// Equality as a pair of multisets.
    pub fn same_multisets(&self, other: &Sequent) -> bool {
        fn sorted(v: &[Formula]) -> Vec<&Formula> {
            let mut v: Vec<&Formula> = v.iter().collect();
            v.sort();
            v
        }
        sorted(&self.ant) == sorted(&other.ant) && sorted(&self.succ) == sorted(&other.succ)
    }

    pub fn in_language(&self) -> Option<&'static str> {
        self.formulas().find_map(|(_, _, f)| f.language_violation(Language::Modal))
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |v: &[Formula]| v.iter().map(print).collect::<Vec<_>>().join(", ");
        let (a, s) = (side(&self.ant), side(&self.succ));
        match (a.is_empty(), s.is_empty()) {
            (true, true) => f.write_str("=>"),
            (true, false) => write!(f, "=> {s}"),
            (false, true) => write!(f, "{a} =>"),
            (false, false) => write!(f, "{a} => {s}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Ant,
    Succ,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleId {
    /// `p => p`, `p` an atom
    AxAtom,
    /// `_|_ =>`
    AxBot,
    WeakL,
    WeakR,
    ContrL,
    ContrR,
    AndL,
    AndR,
    OrL,
    OrR,
    ImpL,
    ImpR,
    /// `([] =>)`
    BoxL,
    /// `(=> [])`
    BoxR,
    /// `(=> V)`
    VR,
    /// `(V/[] =>)`
    Interaction,
    /// `(=> []V)`
    Wie,
}

impl RuleId {
    pub const ALL: [RuleId; 17] = [
        RuleId::AxAtom,
        RuleId::AxBot,
        RuleId::WeakL,
        RuleId::WeakR,
        RuleId::ContrL,
        RuleId::ContrR,
        RuleId::AndL,
        RuleId::AndR,
        RuleId::OrL,
        RuleId::OrR,
        RuleId::ImpL,
        RuleId::ImpR,
        RuleId::BoxL,
        RuleId::BoxR,
        RuleId::VR,
        RuleId::Interaction,
        RuleId::Wie,
    ];

    /// Side of the principal formula for rules that have one.
    pub fn principal_side(self) -> Option<Side> {
        use RuleId::*;
        match self {
            WeakL | ContrL | AndL | OrL | ImpL | BoxL | Interaction => Some(Side::Ant),
            WeakR | ContrR | AndR | OrR | ImpR => Some(Side::Succ),
            _ => None,
        }
    }

    pub fn is_structural(self) -> bool {
        matches!(self, RuleId::WeakL | RuleId::WeakR | RuleId::ContrL | RuleId::ContrR)
    }
}

/// Where a premise formula comes from in the conclusion: the subformula at
/// `concl_path` of conclusion formula `(side, index)` is the subformula at
/// `prem_path` of the premise formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Origin {
    pub side: Side,
    pub index: usize,
    pub concl_path: Vec<u8>,
    pub prem_path: Vec<u8>,
}

fn ctx(side: Side, index: usize) -> Option<Origin> {
    Some(Origin { side, index, concl_path: vec![], prem_path: vec![] })
}

fn comp(side: Side, index: usize, path: &[u8]) -> Option<Origin> {
    Some(Origin { side, index, concl_path: path.to_vec(), prem_path: vec![] })
}

/// A premise as the rule prescribes it, each formula with its origin.
#[derive(Clone, Debug, Default)]
pub struct Expected {
    pub ant: Vec<(Formula, Option<Origin>)>,
    pub succ: Vec<(Formula, Option<Origin>)>,
}

impl Expected {
    pub fn sequent(&self) -> Sequent {
        Sequent {
            ant: self.ant.iter().map(|(f, _)| f.clone()).collect(),
            succ: self.succ.iter().map(|(f, _)| f.clone()).collect(),
        }
    }

    fn side_mut(&mut self, s: Side) -> &mut Vec<(Formula, Option<Origin>)> {
        match s {
            Side::Ant => &mut self.ant,
            Side::Succ => &mut self.succ,
        }
    }

    /// The conclusion as context, minus one formula.
    fn context(c: &Sequent, skip: Option<(Side, usize)>) -> Expected {
        let mut e = Expected::default();
        for (side, i, f) in c.formulas() {
            if skip != Some((side, i)) {
                e.side_mut(side).push((f.clone(), ctx(side, i)));
            }
        }
        e
    }

    fn with(mut self, side: Side, f: Formula, o: Option<Origin>) -> Expected {
        self.side_mut(side).push((f, o));
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("{0:?} is not available in {1}")]
    NotInSystem(RuleId, SequentSystem),
    #[error("principal index {0} is out of range")]
    NoSuchFormula(usize),
    #[error("{rule:?} needs a principal formula of the form {shape}")]
    WrongShape { rule: RuleId, shape: &'static str },
    #[error("{rule:?} needs a principal formula, none was given or found")]
    NoPrincipal { rule: RuleId },
    #[error("{rule:?} has no principal formula")]
    UnexpectedPrincipal { rule: RuleId },
    #[error("side condition of {rule:?} violated: {condition}")]
    SideCondition { rule: RuleId, condition: &'static str },
    #[error("expected {expected} premise(s), found {found}")]
    PremiseCount { expected: usize, found: usize },
    #[error("premise {index} should be `{expected}`, found `{found}`")]
    PremiseMismatch { index: usize, expected: String, found: String },
    #[error("formula outside the modal language: `{0}` is not allowed")]
    Language(&'static str),
}

/// The premises `rule` prescribes for `concl` with principal formula
/// `principal` (an index on the rule's principal side).
pub fn expected_premises(
    concl: &Sequent,
    rule: RuleId,
    principal: Option<usize>,
) -> Result<Vec<Expected>, RuleError> {
    use RuleId::*;
    let shape = |shape| RuleError::WrongShape { rule, shape };
    let side_cond = |condition| RuleError::SideCondition { rule, condition };
    if let Some(side) = rule.principal_side() {
        let k = principal.ok_or(RuleError::NoPrincipal { rule })?;
        let f = concl.side(side).get(k).ok_or(RuleError::NoSuchFormula(k))?.clone();
        let rest = || Expected::context(concl, Some((side, k)));
        let parts = |f: &Formula| -> Option<(Formula, Formula)> {
            match f {
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    Some(((**a).clone(), (**b).clone()))
                }
                _ => None,
            }
        };
        return Ok(match (rule, &f) {
            (WeakL | WeakR, _) => vec![rest()],
            (ContrL | ContrR, _) => {
                vec![Expected::context(concl, None).with(side, f.clone(), ctx(side, k))]
            }
            (AndL, Formula::And(..)) | (OrR, Formula::Or(..)) => {
                let (a, b) = parts(&f).unwrap();
                vec![rest().with(side, a, comp(side, k, &[0])).with(side, b, comp(side, k, &[1]))]
            }
            (AndR, Formula::And(..)) | (OrL, Formula::Or(..)) => {
                let (a, b) = parts(&f).unwrap();
                vec![rest().with(side, a, comp(side, k, &[0])), rest().with(side, b, comp(side, k, &[1]))]
            }
            (ImpL, Formula::Implies(..)) => {
                let (a, b) = parts(&f).unwrap();
                vec![
                    rest().with(Side::Succ, a, comp(side, k, &[0])),
                    rest().with(Side::Ant, b, comp(side, k, &[1])),
                ]
            }
            (ImpR, Formula::Implies(..)) => {
                let (a, b) = parts(&f).unwrap();
                vec![rest().with(Side::Ant, a, comp(side, k, &[0])).with(Side::Succ, b, comp(side, k, &[1]))]
            }
            (BoxL, Formula::Box(x)) => vec![rest().with(side, (**x).clone(), comp(side, k, &[0]))],
            (Interaction, Formula::Box(x)) => vec![rest().with(
                side,
                Formula::ver((**x).clone()),
                Some(Origin { side, index: k, concl_path: vec![0], prem_path: vec![0] }),
            )],
            (AndL | AndR, _) => return Err(shape("A & B")),
            (OrL | OrR, _) => return Err(shape("A | B")),
            (ImpL | ImpR, _) => return Err(shape("A -> B")),
            (BoxL | Interaction, _) => return Err(shape("[]A")),
            _ => unreachable!(),
        });
    }
    match rule {
        AxAtom => match (&concl.ant[..], &concl.succ[..]) {
            ([Formula::Atom(a)], [Formula::Atom(b)]) if a == b => Ok(vec![]),
            _ => Err(side_cond("the sequent must be p => p for an atom p")),
        },
        AxBot => match (&concl.ant[..], &concl.succ[..]) {
            ([Formula::Bottom], []) => Ok(vec![]),
            _ => Err(side_cond("the sequent must be _|_ =>")),
        },
        BoxR => {
            let [Formula::Box(x)] = &concl.succ[..] else {
                return Err(side_cond("the succedent must be a single []X"));
            };
            if !concl.ant.iter().all(|f| matches!(f, Formula::Box(_))) {
                return Err(side_cond("every antecedent formula must be boxed"));
            }
            Ok(vec![Expected::context(concl, Some((Side::Succ, 0)))
                .with(Side::Succ, (**x).clone(), comp(Side::Succ, 0, &[0]))])
        }
        VR => {
            let [Formula::Ver(x)] = &concl.succ[..] else {
                return Err(side_cond("the succedent must be a single V X"));
            };
            let mut e = Expected::default();
            for (i, f) in concl.ant.iter().enumerate() {
                match f {
                    Formula::Box(_) => e.ant.push((f.clone(), ctx(Side::Ant, i))),
                    Formula::Ver(g) => e.ant.push(((**g).clone(), comp(Side::Ant, i, &[0]))),
                    _ => return Err(side_cond("the antecedent must consist of []- and V-formulas")),
                }
            }
            Ok(vec![e.with(Side::Succ, (**x).clone(), comp(Side::Succ, 0, &[0]))])
        }
        Wie => {
            if !concl.succ.is_empty() {
                return Err(side_cond("the succedent must be empty"));
            }
            let bv = Formula::boxed(Formula::ver(Formula::Bottom));
            Ok(vec![Expected::context(concl, None).with(Side::Succ, bv, None)])
        }
        _ => unreachable!(),
    }
}

/// Checks one inference. With no principal given, every candidate is
/// tried; the principal that works is returned.
pub fn check_rule_application(
    concl: &Sequent,
    rule: RuleId,
    principal: Option<usize>,
    premises: &[Sequent],
    system: SequentSystem,
) -> Result<Option<usize>, RuleError> {
    if !system.allows(rule) {
        return Err(RuleError::NotInSystem(rule, system));
    }
    let try_one = |p: Option<usize>| -> Result<(), RuleError> {
        let exp = expected_premises(concl, rule, p)?;
        if exp.len() != premises.len() {
            return Err(RuleError::PremiseCount { expected: exp.len(), found: premises.len() });
        }
        for (i, (e, got)) in exp.iter().zip(premises).enumerate() {
            let e = e.sequent();
            if !e.same_multisets(got) {
                return Err(RuleError::PremiseMismatch {
                    index: i,
                    expected: e.to_string(),
                    found: got.to_string(),
                });
            }
        }
        Ok(())
    };
    match (rule.principal_side(), principal) {
        (None, Some(_)) => Err(RuleError::UnexpectedPrincipal { rule }),
        (None, None) => try_one(None).map(|_| None),
        (Some(_), Some(k)) => try_one(Some(k)).map(|_| Some(k)),
        (Some(side), None) => {
            let n = concl.side(side).len();
            let mut first = None;
            for k in 0..n {
                match try_one(Some(k)) {
                    Ok(()) => return Ok(Some(k)),
                    Err(e) => {
                        first.get_or_insert(e);
                    }
                }
            }
            Err(first.unwrap_or(RuleError::NoPrincipal { rule }))
        }
    }
}

/// For each premise formula, its origin in the conclusion. Premise
/// formulas are paired with the prescribed ones by equality, in order.
pub fn premise_origins(
    concl: &Sequent,
    rule: RuleId,
    principal: Option<usize>,
    premises: &[Sequent],
) -> Result<Vec<Vec<(Side, usize, Option<Origin>)>>, RuleError> {
    let exp = expected_premises(concl, rule, principal)?;
    let mut out = Vec::new();
    for (e, got) in exp.iter().zip(premises) {
        let mut links = Vec::new();
        for side in [Side::Ant, Side::Succ] {
            let mut pool: Vec<Option<&(Formula, Option<Origin>)>> = match side {
                Side::Ant => e.ant.iter().map(Some).collect(),
                Side::Succ => e.succ.iter().map(Some).collect(),
            };
            for (j, f) in got.side(side).iter().enumerate() {
                let slot = pool.iter_mut().find(|s| s.is_some_and(|(g, _)| g == f));
                let Some(slot) = slot else {
                    return Err(RuleError::PremiseMismatch {
                        index: out.len(),
                        expected: e.sequent().to_string(),
                        found: got.to_string(),
                    });
                };
                links.push((side, j, slot.take().unwrap().1.clone()));
            }
        }
        out.push(links);
    }
    Ok(out)
}

/// A node of a sequent derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub sequent: Sequent,
    pub rule: RuleId,
    /// Index of the principal formula on the rule's principal side.
    pub principal: Option<usize>,
    pub premises: Vec<Node>,
}

impl Node {
    pub fn leaf(sequent: Sequent, rule: RuleId) -> Self {
        Node { sequent, rule, principal: None, premises: vec![] }
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Node::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(Node::height).max().unwrap_or(0)
    }

    /// Nodes in pre-order.
    pub fn nodes(&self) -> Vec<&Node> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(n.premises.iter().rev());
        }
        out
    }

    pub fn uses(&self, rule: RuleId) -> bool {
        self.nodes().iter().any(|n| n.rule == rule)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("at node {path:?} (`{sequent}`): {error}")]
pub struct SequentCheckError {
    /// Premise indices from the root to the failing node.
    pub path: Vec<usize>,
    pub sequent: String,
    pub error: RuleError,
}

/// Checks every node; fills in missing principals.
pub fn check_derivation(d: &Node, system: SequentSystem) -> Result<Node, SequentCheckError> {
    fn go(n: &Node, system: SequentSystem, path: &mut Vec<usize>) -> Result<Node, SequentCheckError> {
        let fail = |error, path: &Vec<usize>| SequentCheckError {
            path: path.clone(),
            sequent: n.sequent.to_string(),
            error,
        };
        if let Some(c) = n.sequent.in_language() {
            return Err(fail(RuleError::Language(c), path));
        }
        let prem: Vec<Sequent> = n.premises.iter().map(|p| p.sequent.clone()).collect();
        let principal = check_rule_application(&n.sequent, n.rule, n.principal, &prem, system)
            .map_err(|e| fail(e, path))?;
        let mut premises = Vec::with_capacity(n.premises.len());
        for (i, p) in n.premises.iter().enumerate() {
            path.push(i);
            premises.push(go(p, system, path)?);
            path.pop();
        }
        Ok(Node { sequent: n.sequent.clone(), rule: n.rule, principal, premises })
    }
    go(d, system, &mut Vec::new())
}
