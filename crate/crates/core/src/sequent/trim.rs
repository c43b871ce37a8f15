//! Removes unused formulas from a proof.
//!
//! Each node keeps only the formulas some rule above it actually uses;
//! rules whose output is never used disappear, and weakenings are added
//! where a rule prescribes more than the trimmed premise proves.

use super::prove::{weaken, wrap};
use super::{expected_premises, premise_origins, Node, Sequent, Side};

/// A proof of the same end sequent with minimal contexts. The input must
/// be a checked derivation.
pub fn trim(proof: &Node) -> Node {
    let (n, keep) = trim_node(proof);
    let (steps, _) = weaken(&proof.sequent, |s, i, _| keep.get(s, i));
    let mut out = wrap(steps, n);
    if out.sequent != proof.sequent {
        // same multisets, different order
        if let (Some(side), Some(k)) = (out.rule.principal_side(), out.principal) {
            let f = &out.sequent.side(side)[k];
            out.principal = proof.sequent.side(side).iter().position(|g| g == f);
        }
        out.sequent = proof.sequent.clone();
    }
    out
}

#[derive(Clone, Debug)]
struct Keep {
    ant: Vec<bool>,
    succ: Vec<bool>,
}

impl Keep {
    fn none(s: &Sequent) -> Self {
        Keep { ant: vec![false; s.ant.len()], succ: vec![false; s.succ.len()] }
    }

    fn get(&self, s: Side, i: usize) -> bool {
        match s {
            Side::Ant => self.ant[i],
            Side::Succ => self.succ[i],
        }
    }

    fn set(&mut self, s: Side, i: usize) {
        match s {
            Side::Ant => self.ant[i] = true,
            Side::Succ => self.succ[i] = true,
        }
    }

    fn restrict(&self, s: &Sequent) -> Sequent {
        let pick = |v: &[_], k: &[bool]| v.iter().zip(k).filter(|(_, &k)| k).map(|(f, _)| Clone::clone(f)).collect();
        Sequent { ant: pick(&s.ant, &self.ant), succ: pick(&s.succ, &self.succ) }
    }

    /// Position of conclusion formula `(s, i)` among the kept ones.
    fn reindex(&self, s: Side, i: usize) -> usize {
        let v = match s {
            Side::Ant => &self.ant,
            Side::Succ => &self.succ,
        };
        v[..i].iter().filter(|&&k| k).count()
    }
}

/// Returns a proof of the restriction of `n.sequent` to the kept formulas.
fn trim_node(n: &Node) -> (Node, Keep) {
    let trimmed: Vec<(Node, Keep)> = n.premises.iter().map(trim_node).collect();
    let prem: Vec<Sequent> = n.premises.iter().map(|p| p.sequent.clone()).collect();
    let origins = premise_origins(&n.sequent, n.rule, n.principal, &prem).expect("checked derivation");

    // A premise whose used formulas all come unchanged from distinct
    // conclusion formulas already proves a restriction of the conclusion.
    for (i, (p, pk)) in trimmed.iter().enumerate() {
        let mut keep = Keep::none(&n.sequent);
        let mut ok = true;
        for (side, j, o) in &origins[i] {
            if !pk.get(*side, *j) {
                continue;
            }
            match o {
                Some(o) if o.concl_path.is_empty() && o.prem_path.is_empty() && !keep.get(o.side, o.index) => {
                    keep.set(o.side, o.index)
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return (p.clone(), keep);
        }
    }

    let mut keep = Keep::none(&n.sequent);
    if n.premises.is_empty() {
        keep = Keep { ant: vec![true; n.sequent.ant.len()], succ: vec![true; n.sequent.succ.len()] };
    }
    if let (Some(side), Some(k)) = (n.rule.principal_side(), n.principal) {
        keep.set(side, k);
    }
    if matches!(n.rule, super::RuleId::BoxR | super::RuleId::VR) {
        keep.set(Side::Succ, 0);
    }
    for (i, (_, pk)) in trimmed.iter().enumerate() {
        for (side, j, o) in &origins[i] {
            if let (true, Some(o)) = (pk.get(*side, *j), o) {
                keep.set(o.side, o.index);
            }
        }
    }
    let concl = keep.restrict(&n.sequent);
    let principal = match (n.rule.principal_side(), n.principal) {
        (Some(side), Some(k)) => Some(keep.reindex(side, k)),
        _ => None,
    };
    let expected = expected_premises(&concl, n.rule, principal).expect("restriction keeps the rule");
    let premises = expected
        .iter()
        .zip(trimmed)
        .map(|(e, (p, _))| {
            let e = e.sequent();
            let mut left = p.sequent.clone();
            let (steps, _) = weaken(&e, |s, _, f| {
                let pool = left.side_mut(s);
                let hit = pool.iter().position(|g| g == f);
                hit.map(|k| pool.remove(k)).is_some()
            });
            wrap(steps, p)
        })
        .collect();
    (Node { sequent: concl, rule: n.rule, principal, premises }, keep)
}
