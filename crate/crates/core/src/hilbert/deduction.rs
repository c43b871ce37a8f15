use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::builder::Builder;
use super::derivation::{check_derivation, CheckError, CsMode, Derivation, Justification};
use super::schema::SystemId;
use crate::formula::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeductionError {
    #[error("derivation does not check: {0}")]
    Check(#[from] CheckError),
    #[error("line {0} is not a hypothesis")]
    NotAHypothesis(usize),
    #[error("line {0} necessitates a formula that depends on the discharged hypothesis")]
    NecessitationUnderHypothesis(usize),
    #[error("derivation is empty")]
    Empty,
}

/// Discharges the hypothesis on line `hyp` from the conclusion of `d`:
/// the result derives `A -> F` from the remaining hypotheses.
pub fn deduction(
    d: &Derivation,
    system: SystemId,
    mode: &CsMode,
    hyp: usize,
) -> Result<Derivation, DeductionError> {
    check_derivation(d, system, mode)?;
    let last = d.len().checked_sub(1).ok_or(DeductionError::Empty)?;
    if d.lines.get(hyp).map(|l| &l.just) != Some(&Justification::Hypothesis) {
        return Err(DeductionError::NotAHypothesis(hyp));
    }
    let mut b = Builder::with_mode(system, mode.clone());
    let idx = b.append(d);
    let r = discharge_in(&mut b, idx[last], idx[hyp])?;
    Ok(b.finish(r))
}

/// Inside a builder: from line `target` (proving `F`) and hypothesis line
/// `hyp` (stating `A`), a line proving `A -> F` that no longer depends on
/// `hyp`.
pub fn discharge_in(b: &mut Builder, target: usize, hyp: usize) -> Result<usize, DeductionError> {
    let a: Formula = b.formula(hyp).clone();
    if !b.depends(target).contains(&hyp) {
        return Ok(b.lift(&a, target));
    }
    let mut needed = BTreeSet::from([target]);
    let mut stack = vec![target];
    while let Some(i) = stack.pop() {
        for p in b.line(i).just.premises() {
            if b.depends(p).contains(&hyp) && needed.insert(p) {
                stack.push(p);
            }
        }
    }
    let mut imp: HashMap<usize, usize> = HashMap::new();
    for i in needed {
        let line = match b.line(i).just.clone() {
            Justification::Hypothesis => b.identity(&a),
            Justification::ModusPonens { minor, major } => {
                let under = |k: usize, b: &mut Builder| match imp.get(&k) {
                    Some(&l) => l,
                    None => b.lift(&a, k),
                };
                let mi = under(minor, b);
                let ma = under(major, b);
                b.ctx_mp(ma, mi)
            }
            _ => return Err(DeductionError::NecessitationUnderHypothesis(i)),
        };
        imp.insert(i, line);
    }
    Ok(imp[&target])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, Language};
    use crate::hilbert::schema::Schema;

    fn iel(s: &str) -> Formula {
        parse(s, Language::Iel).unwrap()
    }

    #[test]
    fn identity_case() {
        let mut d = Derivation::new();
        d.push(iel("p"), Justification::Hypothesis);
        let r = deduction(&d, SystemId::IelMinus, &CsMode::Rule, 0).unwrap();
        assert_eq!(r.conclusion(), Some(&iel("p -> p")));
        check_derivation(&r, SystemId::IelMinus, &CsMode::Rule).unwrap();
    }

    #[test]
    fn discharge_gives_back_the_axiom() {
        let mut d = Derivation::new();
        d.push(iel("p"), Justification::Hypothesis);
        d.push(iel("p -> K p"), Justification::axiom(Schema::CoReflection));
        d.push(iel("K p"), Justification::ModusPonens { minor: 0, major: 1 });
        let r = deduction(&d, SystemId::IelMinus, &CsMode::Rule, 0).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.conclusion(), Some(&iel("p -> K p")));
    }

    #[test]
    fn keeps_other_hypotheses() {
        let mut d = Derivation::new();
        d.push(iel("p"), Justification::Hypothesis);
        d.push(iel("p -> q"), Justification::Hypothesis);
        d.push(iel("q"), Justification::ModusPonens { minor: 0, major: 1 });
        let r = deduction(&d, SystemId::IelMinus, &CsMode::Rule, 0).unwrap();
        assert_eq!(r.conclusion(), Some(&iel("p -> q")));
        assert_eq!(r.hypotheses(), vec![&iel("p -> q")]);
        check_derivation(&r, SystemId::IelMinus, &CsMode::Rule).unwrap();
    }

    #[test]
    fn box_nec_cannot_depend() {
        let m = |s: &str| parse(s, Language::Modal).unwrap();
        let mut d = Derivation::new();
        d.push(m("q"), Justification::Hypothesis);
        d.push(m("p -> p -> p"), Justification::axiom(Schema::K));
        d.push(m("[](p -> p -> p)"), Justification::BoxNec { premise: 1 });
        let r = deduction(&d, SystemId::S4v, &CsMode::Rule, 0).unwrap();
        assert_eq!(r.conclusion(), Some(&m("q -> [](p -> p -> p)")));
    }
}
