use thiserror::Error;

use super::builder::Builder;
use super::derivation::{check_derivation, CheckError, ConstantSpec, CsMode, Derivation, Justification};
use super::schema::{Bindings, Schema, SystemId};
use super::taut::NotTautology;
use crate::formula::{Formula, ProofTerm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("derivation does not check: {0}")]
    Check(#[from] CheckError),
    #[error("{0} has no proof terms")]
    NotExplicit(SystemId),
    #[error("derivation is empty")]
    Empty,
    #[error("derivation depends on hypotheses")]
    Hypotheses,
    #[error("conclusion `{found}` is not of the form `{expected}`")]
    Shape { expected: String, found: String },
    #[error(transparent)]
    Tautology(#[from] NotTautology),
}

/// Result of internalizing a derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Internalized {
    pub term: ProofTerm,
    /// Derives `term:F` from `x:A` for each plain hypothesis `A` and from
    /// the quoted hypotheses `y:B` unchanged.
    pub derivation: Derivation,
    /// Plain hypotheses with the variables assigned to them.
    pub variables: Vec<(ProofTerm, Formula)>,
    /// In rule mode, the facts introduced by axiom necessitation; in CS
    /// mode, the given specification extended by the new constants.
    pub cs: ConstantSpec,
}

/// Lifts a derivation of `F` to a derivation of `p:F`. Hypotheses of the
/// form `y:B` with `y` a proof variable are quoted and kept; every other
/// hypothesis `A` is replaced by `x:A` for a fresh `x`. Without hypotheses
/// the term is ground.
pub fn internalize(d: &Derivation, system: SystemId, mode: &CsMode) -> Result<Internalized, LiftError> {
    if !system.is_explicit() {
        return Err(LiftError::NotExplicit(system));
    }
    check_derivation(d, system, mode)?;
    let last = d.len().checked_sub(1).ok_or(LiftError::Empty)?;
    let mut b = Builder::with_mode(system, mode.clone());
    for l in &d.lines {
        b.names.reserve_formula(&l.formula);
    }
    let idx = b.append(d);
    let mut variables = Vec::new();
    for (i, l) in d.lines.iter().enumerate() {
        if l.just != Justification::Hypothesis {
            continue;
        }
        let h = idx[i];
        if !b.depends(h).contains(&h) {
            // Already proved outright; necessitation handles it.
            continue;
        }
        match &l.formula {
            Formula::Evid(t, body) if matches!(**t, ProofTerm::Var(_)) => {
                let e3 = b.axiom(
                    Schema::ProofChecker,
                    &Bindings::new().t((**t).clone()).a((**body).clone()),
                );
                let line = b.mp(h, e3);
                b.set_hypothesis_term(h, ProofTerm::bang((**t).clone()), line);
            }
            a => {
                let x = ProofTerm::Var(b.names.fresh("x"));
                let line = b.hyp(Formula::evid(x.clone(), a.clone()));
                b.set_hypothesis_term(h, x.clone(), line);
                variables.push((x, a.clone()));
            }
        }
    }
    let (term, line) = b.necessitate(idx[last]);
    let derivation = b.finish(line);
    let cs = match mode {
        CsMode::Rule => check_derivation(&derivation, system, mode)?.used_cs,
        CsMode::Given(cs) => {
            let mut all = cs.clone();
            all.extend(b.generated_cs());
            all
        }
    };
    Ok(Internalized { term, derivation, variables, cs })
}

/// One conjunct of a lifting context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LiftItem {
    /// `t:C`, kept as is.
    Evidence(ProofTerm, Formula),
    /// `G`, which becomes `V G`.
    Plain(Formula),
}

impl LiftItem {
    pub fn formula(&self) -> Formula {
        match self {
            LiftItem::Evidence(t, c) => Formula::evid(t.clone(), c.clone()),
            LiftItem::Plain(g) => g.clone(),
        }
    }

    pub fn lifted(&self) -> Formula {
        match self {
            LiftItem::Evidence(..) => self.formula(),
            LiftItem::Plain(g) => Formula::ver(g.clone()),
        }
    }
}

/// From a derivation of `I1 & ... & In -> X` (or of `X` when `items` is
/// empty) builds a derivation of `I1' & ... & In' -> V X`, where evidence
/// items are kept and each plain item `G` becomes `V G`.
pub fn v_lift(
    d: &Derivation,
    system: SystemId,
    mode: &CsMode,
    items: &[LiftItem],
) -> Result<Lifted, LiftError> {
    if !system.is_explicit() {
        return Err(LiftError::NotExplicit(system));
    }
    let v = check_derivation(d, system, mode)?;
    let last = d.len().checked_sub(1).ok_or(LiftError::Empty)?;
    if !v.depends[last].is_empty() {
        return Err(LiftError::Hypotheses);
    }
    let mut b = Builder::with_mode(system, mode.clone());
    let idx = b.append(d);
    let r = b.v_lift(idx[last], items)?;
    let derivation = b.finish(r);
    let cs = match mode {
        CsMode::Rule => check_derivation(&derivation, system, mode)?.used_cs,
        CsMode::Given(cs) => {
            let mut all = cs.clone();
            all.extend(b.generated_cs());
            all
        }
    };
    Ok(Lifted { derivation, cs })
}

/// Result of `v_lift`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lifted {
    pub derivation: Derivation,
    /// As for `Internalized::cs`.
    pub cs: ConstantSpec,
}

impl Builder {
    /// See [`v_lift`]. Line `i` must be hypothesis-free.
    pub fn v_lift(&mut self, i: usize, items: &[LiftItem]) -> Result<usize, LiftError> {
        let cur = self.curry_items(i, items)?;
        self.v_lift_curried(cur, items)
    }

    /// Like [`Builder::v_lift`], for a line already in curried form
    /// `E1 -> ... -> Em -> G1 -> ... -> Gn -> X`: the evidence items of
    /// `items` in order, then the plain ones.
    pub fn v_lift_curried(&mut self, i: usize, items: &[LiftItem]) -> Result<usize, LiftError> {
        let (term, line, body) = self.evidence_prefix(i, items)?;
        if items.is_empty() {
            let e6 = self.axiom(Schema::EvidenceV, &Bindings::new().t(term).a(body));
            return Ok(self.mp(line, e6));
        }
        let out_items: Vec<Formula> = items.iter().map(LiftItem::lifted).collect();
        let e6 = self.axiom(Schema::EvidenceV, &Bindings::new().t(term).a(body.clone()));
        let mut line = self.ctx_apply(line, e6);
        let mut body = body;
        for (k, it) in items.iter().enumerate() {
            let LiftItem::Plain(gk) = it else { continue };
            let rest = match &body {
                Formula::Implies(_, r) => (**r).clone(),
                _ => unreachable!(),
            };
            let e5 = self.axiom(Schema::VK, &Bindings::new().a(gk.clone()).b(rest.clone()));
            let dist = self.ctx_apply(line, e5);
            let p = self.proj(&out_items, k);
            line = self.ctx_mp(dist, p);
            body = rest;
        }
        Ok(line)
    }

    /// From a hypothesis-free line `t1:C1 & ... & tm:Cm -> X` (or `X` when
    /// `evidence` is empty), a term `u` and a line
    /// `t1:C1 & ... & tm:Cm -> u:X` (or `u:X`).
    pub fn box_lift(
        &mut self,
        i: usize,
        evidence: &[(ProofTerm, Formula)],
    ) -> Result<(ProofTerm, usize), LiftError> {
        let items: Vec<LiftItem> =
            evidence.iter().map(|(t, c)| LiftItem::Evidence(t.clone(), c.clone())).collect();
        let cur = self.curry_items(i, &items)?;
        let (term, line, _) = self.evidence_prefix(cur, &items)?;
        Ok((term, line))
    }

    /// [`Builder::box_lift`] for a line `t1:C1 -> ... -> tm:Cm -> X`.
    pub fn box_lift_curried(
        &mut self,
        i: usize,
        evidence: &[(ProofTerm, Formula)],
    ) -> Result<(ProofTerm, usize), LiftError> {
        let items: Vec<LiftItem> =
            evidence.iter().map(|(t, c)| LiftItem::Evidence(t.clone(), c.clone())).collect();
        let (term, line, _) = self.evidence_prefix(i, &items)?;
        Ok((term, line))
    }

    /// The curried form of `items`, evidence items first.
    pub fn curried_form(items: &[LiftItem], x: Formula) -> Formula {
        let (ev, plain): (Vec<&LiftItem>, Vec<&LiftItem>) =
            items.iter().partition(|it| matches!(it, LiftItem::Evidence(..)));
        ev.iter().chain(&plain).rev().fold(x, |acc, it| Formula::implies(it.formula(), acc))
    }

    /// From `I1 & ... & In -> X` (or `X` when `items` is empty) its
    /// curried form.
    fn curry_items(&mut self, i: usize, items: &[LiftItem]) -> Result<usize, LiftError> {
        if items.is_empty() {
            return Ok(i);
        }
        let antecedent: Vec<Formula> = items.iter().map(LiftItem::formula).collect();
        match self.formula(i) {
            Formula::Implies(a, x) if **a == Formula::conj(&antecedent) => {
                let goal = Builder::curried_form(items, (**x).clone());
                Ok(self.tautology(&[i], &goal)?)
            }
            other => Err(LiftError::Shape {
                expected: format!("{} -> X", Formula::conj(&antecedent)),
                found: other.to_string(),
            }),
        }
    }

    /// Necessitates the curried line `i` and applies the result to the
    /// evidence items. Returns the term, a line `C' -> term:rest` under the
    /// lifted context (no context when `items` is empty) and `rest`, the
    /// plain items curried onto `X`.
    fn evidence_prefix(
        &mut self,
        i: usize,
        items: &[LiftItem],
    ) -> Result<(ProofTerm, usize, Formula), LiftError> {
        let curried = self.formula(i).clone();
        let mut x = curried.clone();
        for _ in items {
            match x {
                Formula::Implies(_, r) => x = (*r).clone(),
                _ => {
                    return Err(LiftError::Shape {
                        expected: format!("{} nested implications", items.len()),
                        found: curried.to_string(),
                    })
                }
            }
        }
        if Builder::curried_form(items, x.clone()) != curried {
            return Err(LiftError::Shape {
                expected: Builder::curried_form(items, x).to_string(),
                found: curried.to_string(),
            });
        }
        let cur_line = i;
        let (g, g_line) = self.necessitate(cur_line);
        if items.is_empty() {
            return Ok((g, g_line, x));
        }

        let out_items: Vec<Formula> = items.iter().map(LiftItem::lifted).collect();
        let c = Formula::conj(&out_items);
        let mut term = g;
        let mut body = curried;
        let mut line = self.lift(&c, g_line);
        for (k, it) in items.iter().enumerate() {
            let LiftItem::Evidence(t, cf) = it else { continue };
            let e = it.formula();
            let rest = match &body {
                Formula::Implies(_, r) => (**r).clone(),
                _ => unreachable!(),
            };
            // C -> !t:(t:C)
            let p = self.proj(&out_items, k);
            let e3 = self.axiom(Schema::ProofChecker, &Bindings::new().t(t.clone()).a(cf.clone()));
            let checked = self.ctx_apply(p, e3);
            let bang = ProofTerm::bang(t.clone());
            let e1 = self.axiom(
                Schema::Application,
                &Bindings::new().t(term.clone()).s(bang.clone()).a(e).b(rest.clone()),
            );
            let applied = self.ctx_apply(line, e1);
            line = self.ctx_mp(applied, checked);
            term = ProofTerm::app(term, bang);
            body = rest;
        }
        Ok((term, line, body))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, Language};

    fn e(s: &str) -> Formula {
        parse(s, Language::Explicit).unwrap()
    }

    fn taut(s: &str) -> Derivation {
        let mut b = Builder::new(SystemId::LpvMinus);
        let i = b.prove_tautology(&e(s)).unwrap();
        b.finish(i)
    }

    #[test]
    fn axiom_gets_fresh_constant() {
        let mut d = Derivation::new();
        d.push(e("p -> q -> p"), Justification::axiom(Schema::K));
        let r = internalize(&d, SystemId::LpvMinus, &CsMode::Rule).unwrap();
        assert!(matches!(r.term, ProofTerm::Const(_)));
        assert_eq!(r.cs.len(), 1);
        assert_eq!(r.derivation.conclusion(), Some(&Formula::evid(r.term.clone(), e("p -> q -> p"))));
    }

    #[test]
    fn quoted_hypothesis_gets_bang() {
        let mut d = Derivation::new();
        d.push(e("y:q"), Justification::Hypothesis);
        let r = internalize(&d, SystemId::LpvMinus, &CsMode::Rule).unwrap();
        assert_eq!(r.term, ProofTerm::bang(ProofTerm::var("y")));
        check_derivation(&r.derivation, SystemId::LpvMinus, &CsMode::Rule).unwrap();
    }

    #[test]
    fn plain_hypotheses_give_application() {
        let mut d = Derivation::new();
        d.push(e("p -> q"), Justification::Hypothesis);
        d.push(e("p"), Justification::Hypothesis);
        d.push(e("q"), Justification::ModusPonens { minor: 1, major: 0 });
        let r = internalize(&d, SystemId::LpvMinus, &CsMode::Rule).unwrap();
        let (x2, x1) = (r.variables[0].0.clone(), r.variables[1].0.clone());
        assert_eq!(r.term, ProofTerm::app(x2, x1));
        check_derivation(&r.derivation, SystemId::LpvMinus, &CsMode::Rule).unwrap();
        assert_eq!(r.derivation.hypotheses().len(), 2);
    }

    #[test]
    fn cs_mode_extends_specification() {
        let d = taut("p -> p");
        let r = internalize(&d, SystemId::LpvMinus, &CsMode::Given(ConstantSpec::new())).unwrap();
        assert!(r.term.is_ground());
        check_derivation(&r.derivation, SystemId::LpvMinus, &CsMode::Given(r.cs.clone())).unwrap();
    }

    #[test]
    fn v_necessitation() {
        let d = taut("p -> p");
        let r = v_lift(&d, SystemId::LpvMinus, &CsMode::Rule, &[]).unwrap().derivation;
        assert_eq!(r.conclusion(), Some(&e("V(p -> p)")));
        check_derivation(&r, SystemId::LpvMinus, &CsMode::Rule).unwrap();

        let l = v_lift(&d, SystemId::LpvMinus, &CsMode::Given(ConstantSpec::new()), &[]).unwrap();
        assert!(!l.cs.is_empty());
        check_derivation(&l.derivation, SystemId::LpvMinus, &CsMode::Given(l.cs)).unwrap();
    }

    #[test]
    fn v_monotonicity() {
        let d = taut("p -> p");
        let r = v_lift(&d, SystemId::LpvMinus, &CsMode::Rule, &[LiftItem::Plain(e("p"))]).unwrap().derivation;
        assert_eq!(r.conclusion(), Some(&e("V p -> V p")));
        check_derivation(&r, SystemId::LpvMinus, &CsMode::Rule).unwrap();

        let d = taut("p & q -> p");
        let items = [LiftItem::Plain(e("p")), LiftItem::Plain(e("q"))];
        let r = v_lift(&d, SystemId::LpvMinus, &CsMode::Rule, &items).unwrap().derivation;
        assert_eq!(r.conclusion(), Some(&e("V p & V q -> V p")));
        check_derivation(&r, SystemId::LpvMinus, &CsMode::Rule).unwrap();
    }

    #[test]
    fn v_lift_with_evidence() {
        let d = taut("x:p & q -> x:p & q");
        let items = [LiftItem::Evidence(ProofTerm::var("x"), e("p")), LiftItem::Plain(e("q"))];
        let r = v_lift(&d, SystemId::LpvMinus, &CsMode::Rule, &items).unwrap().derivation;
        assert_eq!(r.conclusion(), Some(&e("x:p & V q -> V(x:p & q)")));
        check_derivation(&r, SystemId::LpvMinus, &CsMode::Rule).unwrap();
    }
}
