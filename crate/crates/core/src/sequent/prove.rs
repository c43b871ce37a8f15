//! Backward proof search.
//!
//! Invertible rules are applied eagerly; left box rules keep their
//! principal formula and fire once per phase. At a saturated sequent the
//! modal right rules are tried in turn, with a loop check on the branch.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::{expected_premises, Node, RuleId, Sequent, SequentSystem, Side};
use crate::formula::Formula;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Bound on logical rule applications along a branch. The left modal
    /// rules are not counted: each boxed formula is expanded at most once
    /// between two right modal steps.
    pub max_depth: usize,
    /// Bound on visited search states.
    pub max_nodes: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_depth: 50, max_nodes: 1_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProveOutcome {
    Proved(Node),
    /// The search space was exhausted without finding a proof.
    SaturatedUnprovable,
    BudgetExhausted,
}

impl ProveOutcome {
    pub fn name(&self) -> &'static str {
        match self {
            ProveOutcome::Proved(_) => "proved",
            ProveOutcome::SaturatedUnprovable => "saturated-unprovable",
            ProveOutcome::BudgetExhausted => "budget-exhausted",
        }
    }

    pub fn proof(&self) -> Option<&Node> {
        match self {
            ProveOutcome::Proved(n) => Some(n),
            _ => None,
        }
    }
}

pub fn prove(goal: &Sequent, system: SequentSystem, budget: Budget) -> ProveOutcome {
    let mut s = Search {
        system,
        budget,
        visited: 0,
        proved: HashMap::new(),
        refuted: HashSet::new(),
        path: Vec::new(),
    };
    match s.search(goal.clone(), &Phase::default(), 0) {
        Ok(n) => ProveOutcome::Proved(super::trim::trim(&n)),
        Err(f) if f.budget => ProveOutcome::BudgetExhausted,
        Err(_) => ProveOutcome::SaturatedUnprovable,
    }
}

type Kernel = (BTreeSet<Formula>, BTreeSet<Formula>);

#[derive(Clone, Copy, Debug, Default)]
struct Fail {
    loop_hit: bool,
    budget: bool,
}

impl Fail {
    fn join(&mut self, o: Fail) {
        self.loop_hit |= o.loop_hit;
        self.budget |= o.budget;
    }
}

/// Boxed antecedent formulas already expanded in the current phase.
#[derive(Clone, Debug, Default)]
struct Phase {
    box_l: BTreeSet<Formula>,
    inter: BTreeSet<Formula>,
}

struct Search {
    system: SequentSystem,
    budget: Budget,
    visited: usize,
    proved: HashMap<Kernel, Node>,
    refuted: HashSet<Kernel>,
    path: Vec<Kernel>,
}

fn step(seq: Sequent, rule: RuleId, principal: Option<usize>, premises: Vec<Node>) -> Node {
    Node { sequent: seq, rule, principal, premises }
}

fn premises(seq: &Sequent, rule: RuleId, principal: Option<usize>) -> Vec<Sequent> {
    expected_premises(seq, rule, principal)
        .expect("rule applies")
        .iter()
        .map(|e| e.sequent())
        .collect()
}

/// Weakening steps from `seq` down to the formulas `keep` selects. Returns
/// the steps, each with its conclusion, and the final sequent.
pub(super) fn weaken(
    seq: &Sequent,
    mut keep: impl FnMut(Side, usize, &Formula) -> bool,
) -> (Vec<(Sequent, RuleId, usize)>, Sequent) {
    let mut steps = Vec::new();
    let mut cur = seq.clone();
    for side in [Side::Ant, Side::Succ] {
        for i in (0..seq.side(side).len()).rev() {
            if !keep(side, i, &seq.side(side)[i]) {
                let rule = if side == Side::Ant { RuleId::WeakL } else { RuleId::WeakR };
                let next = {
                    let mut n = cur.clone();
                    n.side_mut(side).remove(i);
                    n
                };
                steps.push((std::mem::replace(&mut cur, next), rule, i));
            }
        }
    }
    (steps, cur)
}

pub(super) fn wrap(steps: Vec<(Sequent, RuleId, usize)>, top: Node) -> Node {
    steps
        .into_iter()
        .rev()
        .fold(top, |acc, (s, r, i)| step(s, r, Some(i), vec![acc]))
}

fn kernel(seq: &Sequent) -> Kernel {
    (seq.ant.iter().cloned().collect(), seq.succ.iter().cloned().collect())
}

impl Search {
    fn search(&mut self, seq: Sequent, phase: &Phase, depth: usize) -> Result<Node, Fail> {
        self.visited += 1;
        if self.visited > self.budget.max_nodes || depth > self.budget.max_depth {
            return Err(Fail { budget: true, loop_hit: false });
        }

        // duplicates go by weakening
        for side in [Side::Ant, Side::Succ] {
            let v = seq.side(side);
            for j in 1..v.len() {
                if v[..j].contains(&v[j]) {
                    let (steps, next) = weaken(&seq, |s, i, _| (s, i) != (side, j));
                    let n = self.search(next, phase, depth)?;
                    return Ok(wrap(steps, n));
                }
            }
        }

        // axioms
        if let Some(b) = seq.ant.iter().position(|f| *f == Formula::Bottom) {
            let (steps, top) = weaken(&seq, |s, i, _| (s, i) == (Side::Ant, b));
            return Ok(wrap(steps, Node::leaf(top, RuleId::AxBot)));
        }
        for (i, f) in seq.ant.iter().enumerate() {
            if matches!(f, Formula::Atom(_)) {
                if let Some(j) = seq.succ.iter().position(|g| g == f) {
                    let (steps, top) = weaken(&seq, |s, k, _| (s, k) == (Side::Ant, i) || (s, k) == (Side::Succ, j));
                    return Ok(wrap(steps, Node::leaf(top, RuleId::AxAtom)));
                }
            }
        }
        if let Some(j) = seq.succ.iter().position(|f| *f == Formula::Bottom) {
            let next = premises(&seq, RuleId::WeakR, Some(j)).remove(0);
            let n = self.search(next, phase, depth)?;
            return Ok(step(seq, RuleId::WeakR, Some(j), vec![n]));
        }

        // invertible propositional rules, single premise first
        let single = seq
            .ant
            .iter()
            .position(|f| matches!(f, Formula::And(..)))
            .map(|i| (RuleId::AndL, i))
            .or_else(|| {
                seq.succ.iter().enumerate().find_map(|(i, f)| match f {
                    Formula::Or(..) => Some((RuleId::OrR, i)),
                    Formula::Implies(..) => Some((RuleId::ImpR, i)),
                    _ => None,
                })
            });
        let branching = || {
            seq.ant
                .iter()
                .enumerate()
                .find_map(|(i, f)| match f {
                    Formula::Implies(..) => Some((RuleId::ImpL, i)),
                    Formula::Or(..) => Some((RuleId::OrL, i)),
                    _ => None,
                })
                .or_else(|| seq.succ.iter().position(|f| matches!(f, Formula::And(..))).map(|i| (RuleId::AndR, i)))
        };
        if let Some((rule, k)) = single.or_else(branching) {
            let mut done = Vec::new();
            for p in premises(&seq, rule, Some(k)) {
                done.push(self.search(p, phase, depth + 1)?);
            }
            return Ok(step(seq, rule, Some(k), done));
        }

        // left box rules, keeping a copy of the principal formula
        for (rule, seen) in [(RuleId::BoxL, &phase.box_l), (RuleId::Interaction, &phase.inter)] {
            let found = seq.ant.iter().position(|f| matches!(f, Formula::Box(_)) && !seen.contains(f));
            if let Some(k) = found {
                let f = seq.ant[k].clone();
                let mut next_phase = phase.clone();
                match rule {
                    RuleId::BoxL => next_phase.box_l.insert(f),
                    _ => next_phase.inter.insert(f),
                };
                let copied = premises(&seq, RuleId::ContrL, Some(k)).remove(0);
                let last = copied.ant.len() - 1;
                let next = premises(&copied, rule, Some(last)).remove(0);
                let n = self.search(next, &next_phase, depth)?;
                let inner = step(copied, rule, Some(last), vec![n]);
                return Ok(step(seq, RuleId::ContrL, Some(k), vec![inner]));
            }
        }

        self.saturated(seq, depth)
    }

    fn saturated(&mut self, seq: Sequent, depth: usize) -> Result<Node, Fail> {
        let key = kernel(&seq);
        if let Some(n) = self.proved.get(&key) {
            return Ok(n.clone());
        }
        if self.refuted.contains(&key) {
            return Err(Fail::default());
        }
        if self.path.contains(&key) {
            return Err(Fail { loop_hit: true, budget: false });
        }
        self.path.push(key.clone());
        let r = self.modal_right(&seq, depth);
        self.path.pop();
        match &r {
            Ok(n) => {
                self.proved.insert(key, n.clone());
            }
            Err(f) if !f.loop_hit && !f.budget => {
                self.refuted.insert(key);
            }
            Err(_) => {}
        }
        r
    }

    fn modal_right(&mut self, seq: &Sequent, depth: usize) -> Result<Node, Fail> {
        let mut fail = Fail::default();
        let modal = |f: &Formula| matches!(f, Formula::Box(_) | Formula::Ver(_));

        let mut candidates = Vec::new();
        for (j, f) in seq.succ.iter().enumerate() {
            if matches!(f, Formula::Ver(_)) {
                candidates.push((RuleId::VR, j));
            }
        }
        for (j, f) in seq.succ.iter().enumerate() {
            if matches!(f, Formula::Box(_)) {
                candidates.push((RuleId::BoxR, j));
            }
        }
        if self.system.allows(RuleId::Wie) {
            candidates.push((RuleId::Wie, 0));
        }

        for (rule, j) in candidates {
            let (steps, concl) = match rule {
                RuleId::VR => weaken(seq, |s, i, f| match s {
                    Side::Ant => modal(f),
                    Side::Succ => i == j,
                }),
                RuleId::BoxR => weaken(seq, |s, i, f| match s {
                    Side::Ant => matches!(f, Formula::Box(_)),
                    Side::Succ => i == j,
                }),
                _ => weaken(seq, |s, _, _| s == Side::Ant),
            };
            let next = premises(&concl, rule, None).remove(0);
            match self.search(next, &Phase::default(), depth + 1) {
                Ok(n) => return Ok(wrap(steps, step(concl, rule, None, vec![n]))),
                Err(f) => {
                    fail.join(f);
                    if self.visited > self.budget.max_nodes {
                        break;
                    }
                }
            }
        }
        Err(fail)
    }
}
