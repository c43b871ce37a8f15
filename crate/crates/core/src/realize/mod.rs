//! Realization: from a cut-free sequent proof of a modal formula to a
//! formula with proof terms in place of boxes, together with a Hilbert
//! derivation of it in the explicit logic.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::formula::{box_positions, polarity_from, Formula, Language, Polarity, ProofTerm};
use crate::hilbert::{
    check_derivation, Bindings, Builder, CheckError, ConstantSpec, CsMode, Derivation, LiftError,
    LiftItem, NotTautology, Schema, SystemId,
};
use crate::sequent::{
    check_derivation as check_sequent, premise_origins, prove, Budget, Node, Origin, ProveOutcome,
    RuleId, Sequent, SequentCheckError, SequentSystem, Side,
};
use crate::translate::{godel_tr, TranslateError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizeError {
    #[error("not a valid sequent derivation: {0}")]
    Sequent(#[from] SequentCheckError),
    #[error("box family {0} has occurrences of both polarities")]
    MixedPolarity(usize),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Tautology(#[from] NotTautology),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error("no proof found: {0}")]
    NotProved(&'static str),
    #[error("internal error, witness does not check: {0}")]
    Witness(#[from] CheckError),
}

/// A `[]` occurrence in a proof: node (pre-order index), formula and
/// position inside the formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occurrence {
    pub node: usize,
    pub side: Side,
    pub index: usize,
    pub path: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxFamily {
    pub id: usize,
    pub members: Vec<Occurrence>,
    pub polarity: Polarity,
    /// Nodes where a member is introduced by `(=> [])`, in pre-order.
    pub introductions: Vec<usize>,
}

impl BoxFamily {
    pub fn essential(&self) -> bool {
        !self.introductions.is_empty()
    }

    pub fn n_f(&self) -> usize {
        self.introductions.len()
    }
}

type Links = Vec<Vec<(Side, usize, Option<Origin>)>>;

/// A checked proof, flattened in pre-order, with its box families.
#[derive(Clone, Debug)]
pub struct Annotation {
    pub nodes: Vec<Node>,
    pub children: Vec<Vec<usize>>,
    pub families: Vec<BoxFamily>,
    family_of: HashMap<Occurrence, usize>,
    links: Vec<Links>,
}

impl Annotation {
    pub fn family_of(&self, occ: &Occurrence) -> Option<usize> {
        self.family_of.get(occ).copied()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Checks `proof` and groups its box occurrences into families: an
/// occurrence in a premise and the one it comes from in the conclusion
/// belong to the same family.
pub fn annotate_boxes(proof: &Node, system: SequentSystem) -> Result<Annotation, RealizeError> {
    let proof = check_sequent(proof, system)?;
    let mut nodes = Vec::new();
    let mut children = Vec::new();
    let mut stack = vec![(proof, None::<usize>)];
    while let Some((n, parent)) = stack.pop() {
        let id = nodes.len();
        children.push(Vec::new());
        if let Some(p) = parent {
            children[p].push(id);
        }
        let Node { sequent, rule, principal, premises } = n;
        for p in premises.iter().rev() {
            stack.push((p.clone(), Some(id)));
        }
        nodes.push(Node { sequent, rule, principal, premises: Vec::new() });
    }
    // pre-order: children were pushed in reverse, so fix their order
    for c in &mut children {
        c.sort_unstable();
    }

    let mut occs: Vec<Occurrence> = Vec::new();
    let mut index: HashMap<Occurrence, usize> = HashMap::new();
    for (id, n) in nodes.iter().enumerate() {
        for (side, i, f) in n.sequent.formulas() {
            for p in box_positions(f) {
                let o = Occurrence { node: id, side, index: i, path: p.0 };
                index.insert(o.clone(), occs.len());
                occs.push(o);
            }
        }
    }
    let mut uf = UnionFind((0..occs.len()).collect());
    let mut links = Vec::with_capacity(nodes.len());
    for (id, n) in nodes.iter().enumerate() {
        let prem: Vec<Sequent> = children[id].iter().map(|&c| nodes[c].sequent.clone()).collect();
        let l = premise_origins(&n.sequent, n.rule, n.principal, &prem).map_err(|error| SequentCheckError {
            path: vec![],
            sequent: n.sequent.to_string(),
            error,
        })?;
        for (pi, per) in l.iter().enumerate() {
            let c = children[id][pi];
            for (side, j, origin) in per {
                let Some(o) = origin else { continue };
                let pf = &nodes[c].sequent.side(*side)[*j];
                let sub = pf.at(&o.prem_path).expect("origin path");
                for q in box_positions(sub) {
                    let mut pp = o.prem_path.clone();
                    pp.extend(&q.0);
                    let mut cp = o.concl_path.clone();
                    cp.extend(&q.0);
                    let a = index[&Occurrence { node: c, side: *side, index: *j, path: pp }];
                    let b = index[&Occurrence { node: id, side: o.side, index: o.index, path: cp }];
                    uf.union(a, b);
                }
            }
        }
        links.push(l);
    }

    let mut root_to_family: HashMap<usize, usize> = HashMap::new();
    let mut families: Vec<BoxFamily> = Vec::new();
    let mut family_of = HashMap::new();
    for (k, o) in occs.iter().enumerate() {
        let r = uf.find(k);
        let f = *root_to_family.entry(r).or_insert_with(|| {
            families.push(BoxFamily {
                id: families.len(),
                members: Vec::new(),
                polarity: Polarity::Positive,
                introductions: Vec::new(),
            });
            families.len() - 1
        });
        let formula = &nodes[o.node].sequent.side(o.side)[o.index];
        let start = if o.side == Side::Ant { Polarity::Negative } else { Polarity::Positive };
        let pol = polarity_from(formula, &o.path, start).expect("occurrence path");
        let fam = &mut families[f];
        if fam.members.is_empty() {
            fam.polarity = pol;
        } else if fam.polarity != pol {
            return Err(RealizeError::MixedPolarity(f));
        }
        if nodes[o.node].rule == RuleId::BoxR && o.side == Side::Succ && o.path.is_empty() {
            fam.introductions.push(o.node);
        }
        fam.members.push(o.clone());
        family_of.insert(o.clone(), f);
    }
    Ok(Annotation { nodes, children, families, family_of, links })
}

/// Result of realizing a sequent proof.
#[derive(Clone, Debug)]
pub struct Realization {
    pub system: SystemId,
    /// The realized end formula: `F^r` for an end sequent `=> F`,
    /// otherwise the realized `/\ ant -> \/ succ`.
    pub formula: Formula,
    pub witness: Derivation,
    pub families: Vec<BoxFamily>,
    /// Final term of each family.
    pub terms: Vec<ProofTerm>,
    /// Provisional variables of essential families and what replaced them,
    /// in the order the substitutions were made.
    pub substitutions: Vec<(Arc<str>, ProofTerm)>,
    /// Realized `/\ ant -> \/ succ` of each node, in pre-order.
    pub node_formulas: Vec<Formula>,
    pub cs: ConstantSpec,
}

pub fn witness_system(system: SequentSystem) -> SystemId {
    match system {
        SequentSystem::S4vMinusG => SystemId::LpvMinus,
        SequentSystem::S4vG => SystemId::Lpv,
    }
}

enum Term {
    Single(ProofTerm),
    /// Left-associated sum of one leaf per introduction.
    Sum(Vec<ProofTerm>),
}

impl Term {
    fn term(&self) -> ProofTerm {
        match self {
            Term::Single(t) => t.clone(),
            Term::Sum(v) => sum(v),
        }
    }

    fn subst(&mut self, name: &str, by: &ProofTerm) {
        let map = |n: &str| (n == name).then(|| by.clone());
        match self {
            Term::Single(t) => {
                if let Some(n) = t.subst_vars(&map) {
                    *t = n;
                }
            }
            Term::Sum(v) => {
                for t in v.iter_mut() {
                    if let Some(n) = t.subst_vars(&map) {
                        *t = n;
                    }
                }
            }
        }
    }
}

fn sum(leaves: &[ProofTerm]) -> ProofTerm {
    let mut it = leaves.iter().cloned();
    let first = it.next().expect("non-empty sum");
    it.fold(first, ProofTerm::plus)
}

struct Realizer<'a> {
    ann: &'a Annotation,
    b: Builder,
    terms: Vec<Term>,
    substitutions: Vec<(Arc<str>, ProofTerm)>,
}

impl Realizer<'_> {
    fn realized(&self, node: usize, side: Side, index: usize) -> Formula {
        let f = &self.ann.nodes[node].sequent.side(side)[index];
        let mut path = Vec::new();
        self.walk(f, node, side, index, &mut path)
    }

    fn walk(&self, f: &Formula, node: usize, side: Side, index: usize, path: &mut Vec<u8>) -> Formula {
        let mut kids = Vec::new();
        for (i, c) in f.children().into_iter().enumerate() {
            path.push(i as u8);
            kids.push(self.walk(c, node, side, index, path));
            path.pop();
        }
        let mut kids = kids.into_iter();
        let mut next = || kids.next().expect("child");
        match f {
            Formula::Atom(_) | Formula::Bottom => f.clone(),
            Formula::And(..) => Formula::and(next(), next()),
            Formula::Or(..) => Formula::or(next(), next()),
            Formula::Implies(..) => Formula::implies(next(), next()),
            Formula::Ver(_) => Formula::ver(next()),
            Formula::Box(_) => {
                let occ = Occurrence { node, side, index, path: path.clone() };
                let t = self.terms[self.ann.family_of[&occ]].term();
                Formula::evid(t, next())
            }
            Formula::Know(_) | Formula::Evid(..) => unreachable!("modal language"),
        }
    }

    fn side(&self, node: usize, side: Side) -> Vec<Formula> {
        (0..self.ann.nodes[node].sequent.side(side).len())
            .map(|i| self.realized(node, side, i))
            .collect()
    }

    fn node_formula(&self, node: usize) -> Formula {
        Formula::implies(
            Formula::conj(&self.side(node, Side::Ant)),
            Formula::disj(&self.side(node, Side::Succ)),
        )
    }

    fn evidence(&self, node: usize, side: Side, index: usize) -> (ProofTerm, Formula) {
        match self.realized(node, side, index) {
            Formula::Evid(t, a) => ((*t).clone(), (*a).clone()),
            _ => unreachable!("boxed formula"),
        }
    }

    /// Lift items of the premise `c` of a `(=> V)` or `(=> [])` node, in
    /// premise antecedent order, and the realized succedent.
    fn lift_items(&self, id: usize) -> (Vec<LiftItem>, Formula) {
        let ann = self.ann;
        let c = ann.children[id][0];
        let items = ann.links[id][0]
            .iter()
            .filter(|(s, _, _)| *s == Side::Ant)
            .map(|(_, j, o)| match o {
                Some(o) if o.concl_path.is_empty() => {
                    let (t, a) = self.evidence(c, Side::Ant, *j);
                    LiftItem::Evidence(t, a)
                }
                _ => LiftItem::Plain(self.realized(c, Side::Ant, *j)),
            })
            .collect();
        (items, self.realized(c, Side::Succ, 0))
    }

    /// A line for the part of the proof above `top` and below the next
    /// modal right rules. Everything in between is propositional, so one
    /// tautology step covers it; `goal` is computed once the modal rules
    /// above have been realized and their substitutions made.
    fn segment(&mut self, top: usize, goal: &dyn Fn(&Self) -> Formula) -> Result<usize, RealizeError> {
        let ann = self.ann;
        let mut premises = Vec::new();
        let mut stack = vec![top];
        while let Some(id) = stack.pop() {
            let n = &ann.nodes[id];
            match n.rule {
                RuleId::BoxR | RuleId::VR => {
                    premises.push(self.modal(id)?);
                    continue;
                }
                RuleId::BoxL | RuleId::Interaction => {
                    let (t, x) = self.evidence(id, Side::Ant, n.principal.expect("principal"));
                    let schema = if n.rule == RuleId::BoxL { Schema::Reflection } else { Schema::EvidenceV };
                    premises.push(self.b.axiom(schema, &Bindings::new().t(t).a(x)));
                }
                RuleId::Wie => {
                    let j = ann.links[id][0]
                        .iter()
                        .find(|(s, _, o)| *s == Side::Succ && o.is_none())
                        .map(|(_, j, _)| *j)
                        .expect("WIE formula");
                    let (t, _) = self.evidence(ann.children[id][0], Side::Succ, j);
                    premises.push(self.b.axiom(Schema::NotEvidenceVBottom, &Bindings::new().t(t)));
                }
                _ => {}
            }
            stack.extend(ann.children[id].iter().rev());
        }
        let goal = goal(self);
        Ok(self.b.tautology(&premises, &goal)?)
    }

    /// A line for the realized conclusion of a `(=> V)` or `(=> [])` node,
    /// not necessarily in sequent form.
    fn modal(&mut self, id: usize) -> Result<usize, RealizeError> {
        let ann = self.ann;
        let c = ann.children[id][0];
        let curried = |r: &Self| {
            let (items, x) = r.lift_items(id);
            Builder::curried_form(&items, x)
        };
        let line = self.segment(c, &curried)?;
        let (items, _) = self.lift_items(id);
        if ann.nodes[id].rule == RuleId::VR {
            return Ok(self.b.v_lift_curried(line, &items)?);
        }
        let evidence: Vec<(ProofTerm, Formula)> = items
            .into_iter()
            .map(|it| match it {
                LiftItem::Evidence(t, a) => (t, a),
                LiftItem::Plain(_) => unreachable!("boxed antecedent"),
            })
            .collect();
        let (u, line) = self.b.box_lift_curried(line, &evidence)?;
        let fam = ann.family_of[&Occurrence { node: id, side: Side::Succ, index: 0, path: vec![] }];
        let k = ann.families[fam].introductions.iter().position(|&x| x == id).expect("introduction");
        let Term::Sum(leaves) = &self.terms[fam] else { unreachable!("essential family") };
        let ProofTerm::Var(v) = &leaves[k] else { unreachable!("provisional variable") };
        let v = v.clone();
        self.substitute(&v, &u);
        let Term::Sum(leaves) = &self.terms[fam] else { unreachable!() };
        let leaves = leaves.clone();
        let ctx = !evidence.is_empty();
        let x = match self.b.formula(line) {
            Formula::Implies(_, e) if ctx => e.as_ref().clone(),
            e => e.clone(),
        };
        let Formula::Evid(_, x) = x else { unreachable!("evidence line") };
        Ok(self.plus_chain(line, &leaves, k, &x, ctx))
    }

    /// From `leaves[k]:X` (under a context if `ctx`), `S:X` for the sum `S`
    /// of `leaves`.
    fn plus_chain(&mut self, line: usize, leaves: &[ProofTerm], k: usize, x: &Formula, ctx: bool) -> usize {
        let n = leaves.len();
        if n == 1 {
            return line;
        }
        let init = sum(&leaves[..n - 1]);
        let (inner, ax) = if k == n - 1 {
            let b = Bindings::new().t(leaves[k].clone()).s(init).a(x.clone());
            (line, self.b.axiom(Schema::PlusLeft, &b))
        } else {
            let inner = self.plus_chain(line, &leaves[..n - 1], k, x, ctx);
            let b = Bindings::new().t(init).s(leaves[n - 1].clone()).a(x.clone());
            (inner, self.b.axiom(Schema::PlusRight, &b))
        };
        if ctx {
            self.b.ctx_apply(inner, ax)
        } else {
            self.b.mp(inner, ax)
        }
    }

    fn substitute(&mut self, v: &Arc<str>, by: &ProofTerm) {
        let map = |n: &str| (n == &**v).then(|| by.clone());
        self.b.subst_term_vars(&map);
        for t in &mut self.terms {
            t.subst(v, by);
        }
        self.substitutions.push((v.clone(), by.clone()));
    }
}

/// Realizes the end sequent of `proof`.
pub fn realize(proof: &Node, system: SequentSystem) -> Result<Realization, RealizeError> {
    let ann = annotate_boxes(proof, system)?;
    let witness_sys = witness_system(system);
    let mut b = Builder::new(witness_sys);
    let terms: Vec<Term> = ann
        .families
        .iter()
        .map(|f| {
            if f.polarity == Polarity::Positive && f.essential() {
                Term::Sum((0..f.n_f()).map(|_| ProofTerm::Var(b.names.fresh("v"))).collect())
            } else {
                Term::Single(ProofTerm::Var(b.names.fresh("x")))
            }
        })
        .collect();
    let mut r = Realizer { ann: &ann, b, terms, substitutions: Vec::new() };

    let root = &ann.nodes[0].sequent;
    let end_goal = |r: &Realizer| {
        if root.ant.is_empty() && root.succ.len() == 1 {
            r.realized(0, Side::Succ, 0)
        } else {
            r.node_formula(0)
        }
    };
    let end = r.segment(0, &end_goal)?;
    let formula = r.b.formula(end).clone();
    let witness = r.b.finish(end);
    let verdict = check_derivation(&witness, witness_sys, &CsMode::Rule)?;
    let node_formulas = (0..ann.nodes.len()).map(|i| r.node_formula(i)).collect();
    let terms = r.terms.iter().map(Term::term).collect();
    Ok(Realization {
        system: witness_sys,
        formula,
        witness,
        families: ann.families.clone(),
        terms,
        substitutions: r.substitutions,
        node_formulas,
        cs: verdict.used_cs,
    })
}

/// Realization of an intuitionistic epistemic formula through its
/// translation.
#[derive(Clone, Debug)]
pub struct IelRealization {
    pub source: Formula,
    pub translation: Formula,
    pub proof: Node,
    pub realization: Realization,
}

/// Translates `f`, searches for a proof of the translation and realizes
/// it. `iel` selects the logic with factivity and `~K _|_`.
pub fn realize_iel(f: &Formula, iel: bool, budget: Budget) -> Result<IelRealization, RealizeError> {
    let translation = godel_tr(f)?;
    debug_assert!(translation.in_language(Language::Modal));
    let system = if iel { SequentSystem::S4vG } else { SequentSystem::S4vMinusG };
    let goal = Sequent::new(vec![], vec![translation.clone()]);
    match prove(&goal, system, budget) {
        ProveOutcome::Proved(proof) => {
            let realization = realize(&proof, system)?;
            Ok(IelRealization { source: f.clone(), translation, proof, realization })
        }
        o => Err(RealizeError::NotProved(o.name())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, parse_sequent_sides};
    use crate::translate::forgetful_projection;

    fn seq(s: &str) -> Sequent {
        let (a, b) = parse_sequent_sides(s, Language::Modal).unwrap();
        Sequent::new(a, b)
    }

    fn proof(s: &str, sys: SequentSystem) -> Node {
        prove(&seq(s), sys, Budget::default()).proof().cloned().expect("provable")
    }

    fn check(r: &Realization, sys: SystemId) {
        check_derivation(&r.witness, sys, &CsMode::Rule).unwrap();
        assert_eq!(r.witness.conclusion(), Some(&r.formula));
        assert!(r.witness.hypotheses().is_empty());
    }

    #[test]
    fn box_right_on_axiom() {
        let p = proof("=> [](p -> p)", SequentSystem::S4vMinusG);
        let r = realize(&p, SequentSystem::S4vMinusG).unwrap();
        check(&r, SystemId::LpvMinus);
        assert_eq!(forgetful_projection(&r.formula).unwrap(), parse("[](p -> p)", Language::Modal).unwrap());
        assert_eq!(r.substitutions.len(), 1);
    }

    #[test]
    fn verification_sequent() {
        let p = proof("[]p, [](p -> q) => V q", SequentSystem::S4vMinusG);
        let r = realize(&p, SequentSystem::S4vMinusG).unwrap();
        check(&r, SystemId::LpvMinus);
        assert!(r.families.iter().all(|f| f.polarity == Polarity::Negative));
    }

    #[test]
    fn not_box_v_bottom() {
        let p = proof("=> ~[]V _|_", SequentSystem::S4vG);
        let r = realize(&p, SequentSystem::S4vG).unwrap();
        check(&r, SystemId::Lpv);
        assert!(realize(&p, SequentSystem::S4vMinusG).is_err());
    }

    #[test]
    fn iel_examples() {
        for (s, iel) in [
            ("p -> K p", false),
            ("K(p -> q) -> K p -> K q", false),
            ("~K _|_", true),
            ("K p -> ~~p", true),
            ("K p & K q -> K(p & q)", false),
        ] {
            let f = parse(s, Language::Iel).unwrap();
            let r = realize_iel(&f, iel, Budget::default()).unwrap();
            let sys = if iel { SystemId::Lpv } else { SystemId::LpvMinus };
            check(&r.realization, sys);
            assert_eq!(forgetful_projection(&r.realization.formula).unwrap(), r.translation, "{s}");
        }
    }

    #[test]
    fn unprovable_is_reported() {
        let f = parse("K p -> p", Language::Iel).unwrap();
        assert_eq!(
            realize_iel(&f, true, Budget::default()).unwrap_err(),
            RealizeError::NotProved("saturated-unprovable")
        );
    }
}
