//! Incremental construction of Hilbert derivations.
//!
//! Most helpers work "under a context": a line `C -> X` is read as a proof
//! of `X` from the assumption `C`, and the combinators compose such lines
//! with the K and S schemas.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::{Arc, OnceLock};

use super::derivation::{ConstantSpec, CsMode, Derivation, Justification, Line};
use super::schema::{Bindings, Schema, SystemId};
use crate::formula::{Formula, ProofTerm};

/// Fresh proof-term names that avoid everything already in use.
#[derive(Clone, Debug, Default)]
pub struct NamePool {
    used: HashSet<Arc<str>>,
    counters: HashMap<&'static str, usize>,
}

impl NamePool {
    pub fn reserve_formula(&mut self, f: &Formula) {
        for t in f.terms() {
            let (mut v, mut c) = (BTreeSet::new(), BTreeSet::new());
            t.collect_names(&mut v, &mut c);
            self.used.extend(v);
            self.used.extend(c);
        }
    }

    pub fn reserve(&mut self, name: &str) {
        self.used.insert(name.into());
    }

    pub fn fresh(&mut self, prefix: &'static str) -> Arc<str> {
        let n = self.counters.entry(prefix).or_insert(0);
        loop {
            *n += 1;
            let name: Arc<str> = format!("{prefix}{n}").into();
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }
}

/// A derivation under construction.
///
/// Lines without hypotheses are shared: adding a formula that is already
/// proved outright returns the existing line.
#[derive(Clone, Debug)]
pub struct Builder {
    system: SystemId,
    mode: CsMode,
    lines: Vec<Line>,
    deps: Vec<BTreeSet<usize>>,
    proved: HashMap<Formula, usize>,
    hyps: HashMap<Formula, usize>,
    nec: HashMap<usize, (ProofTerm, usize)>,
    generated: ConstantSpec,
    pub names: NamePool,
}

impl Builder {
    pub fn new(system: SystemId) -> Self {
        Builder::with_mode(system, CsMode::Rule)
    }

    pub fn with_mode(system: SystemId, mode: CsMode) -> Self {
        let mut names = NamePool::default();
        if let CsMode::Given(cs) = &mode {
            for (c, f) in cs.iter() {
                names.reserve(c);
                names.reserve_formula(f);
            }
        }
        Builder {
            system,
            mode,
            lines: Vec::new(),
            deps: Vec::new(),
            proved: HashMap::new(),
            hyps: HashMap::new(),
            nec: HashMap::new(),
            generated: ConstantSpec::new(),
            names,
        }
    }

    pub fn system(&self) -> SystemId {
        self.system
    }

    pub fn mode(&self) -> &CsMode {
        &self.mode
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn formula(&self, i: usize) -> &Formula {
        &self.lines[i].formula
    }

    pub fn line(&self, i: usize) -> &Line {
        &self.lines[i]
    }

    pub fn depends(&self, i: usize) -> &BTreeSet<usize> {
        &self.deps[i]
    }

    /// Constants introduced as specification lines in CS mode.
    pub fn generated_cs(&self) -> &ConstantSpec {
        &self.generated
    }

    /// Existing hypothesis-free line proving `f`.
    pub fn find(&self, f: &Formula) -> Option<usize> {
        self.proved.get(f).copied()
    }

    /// Appends a line as given. No check is performed here.
    pub fn add(&mut self, formula: Formula, just: Justification) -> usize {
        if let Some(&i) = self.proved.get(&formula) {
            return i;
        }
        if just == Justification::Hypothesis {
            if let Some(&i) = self.hyps.get(&formula) {
                return i;
            }
        }
        self.names.reserve_formula(&formula);
        let i = self.lines.len();
        let deps = match &just {
            Justification::Hypothesis => {
                self.hyps.insert(formula.clone(), i);
                BTreeSet::from([i])
            }
            Justification::ModusPonens { minor, major } => &self.deps[*minor] | &self.deps[*major],
            _ => BTreeSet::new(),
        };
        if deps.is_empty() {
            self.proved.insert(formula.clone(), i);
        }
        self.lines.push(Line { formula, just });
        self.deps.push(deps);
        i
    }

    pub fn hyp(&mut self, f: Formula) -> usize {
        self.add(f, Justification::Hypothesis)
    }

    pub fn axiom(&mut self, schema: Schema, b: &Bindings) -> usize {
        debug_assert!(self.system.has_schema(schema), "{schema} not in {}", self.system);
        self.add(schema.instantiate(b), Justification::axiom(schema))
    }

    /// `minor: A`, `major: A -> B` gives `B`.
    pub fn mp(&mut self, minor: usize, major: usize) -> usize {
        let b = match self.formula(major) {
            Formula::Implies(a, b) if **a == *self.formula(minor) => (**b).clone(),
            other => panic!(
                "modus ponens mismatch: {} against {}",
                self.formula(minor),
                other
            ),
        };
        self.add(b, Justification::ModusPonens { minor, major })
    }

    /// `c:A` for the axiom line `i`, with `c` fresh. In CS mode this adds a
    /// specification line instead of using the rule.
    pub fn axiom_nec(&mut self, i: usize) -> (ProofTerm, usize) {
        let c = self.names.fresh("c");
        let a = self.formula(i).clone();
        let term = ProofTerm::Const(c.clone());
        let f = Formula::evid(term.clone(), a.clone());
        let line = match &mut self.mode {
            CsMode::Rule => self.add(f, Justification::AxiomNec { premise: i }),
            CsMode::Given(cs) => {
                cs.insert(&c, a.clone());
                self.generated.insert(&c, a);
                self.add(f, Justification::Cs)
            }
        };
        (term, line)
    }

    // ---- context combinators ------------------------------------------

    fn split_imp(&self, i: usize) -> (Formula, Formula) {
        match self.formula(i) {
            Formula::Implies(a, b) => ((**a).clone(), (**b).clone()),
            other => panic!("expected an implication, got {other}"),
        }
    }

    /// `X` gives `C -> X`.
    pub fn lift(&mut self, c: &Formula, i: usize) -> usize {
        let x = self.formula(i).clone();
        let target = Formula::implies(c.clone(), x.clone());
        if let Some(j) = self.find(&target) {
            return j;
        }
        let k = self.axiom(Schema::K, &Bindings::new().a(x).b(c.clone()));
        self.mp(i, k)
    }

    /// `C -> (X -> Y)` and `C -> X` give `C -> Y`.
    pub fn ctx_mp(&mut self, i: usize, j: usize) -> usize {
        let (c, xy) = self.split_imp(i);
        let (_, y) = match &xy {
            Formula::Implies(x, y) => ((**x).clone(), (**y).clone()),
            other => panic!("expected C -> (X -> Y), got {other}"),
        };
        let target = Formula::implies(c.clone(), y.clone());
        if let Some(k) = self.find(&target) {
            return k;
        }
        let (_, x) = self.split_imp(j);
        let s = self.axiom(Schema::S, &Bindings::new().a(c).b(x).c(y));
        let m = self.mp(i, s);
        self.mp(j, m)
    }

    /// `C -> X` and `X -> Y` give `C -> Y`.
    pub fn ctx_apply(&mut self, i: usize, j: usize) -> usize {
        let (c, _) = self.split_imp(i);
        let (_, y) = self.split_imp(j);
        let target = Formula::implies(c.clone(), y);
        if let Some(k) = self.find(&target) {
            return k;
        }
        let lifted = self.lift(&c, j);
        self.ctx_mp(lifted, i)
    }

    /// `A -> A`.
    pub fn identity(&mut self, a: &Formula) -> usize {
        let target = Formula::implies(a.clone(), a.clone());
        if let Some(k) = self.find(&target) {
            return k;
        }
        let aa = target;
        let k1 = self.axiom(Schema::K, &Bindings::new().a(a.clone()).b(aa.clone()));
        let s = self.axiom(Schema::S, &Bindings::new().a(a.clone()).b(aa).c(a.clone()));
        let m = self.mp(k1, s);
        let k2 = self.axiom(Schema::K, &Bindings::new().a(a.clone()).b(a.clone()));
        self.mp(k2, m)
    }

    /// `C -> X` and `C -> Y` give `C -> X & Y`.
    pub fn ctx_conj(&mut self, i: usize, j: usize) -> usize {
        let (c, x) = self.split_imp(i);
        let (_, y) = self.split_imp(j);
        let target = Formula::implies(c.clone(), Formula::and(x.clone(), y.clone()));
        if let Some(k) = self.find(&target) {
            return k;
        }
        let intro = self.axiom(Schema::AndIntro, &Bindings::new().a(x).b(y));
        let lifted = self.lift(&c, intro);
        let m = self.ctx_mp(lifted, i);
        self.ctx_mp(m, j)
    }

    /// For `C = I0 & (I1 & (... & In))`, the line `C -> Ik`.
    pub fn proj(&mut self, items: &[Formula], k: usize) -> usize {
        let c = Formula::conj(items);
        let n = items.len();
        assert!(k < n);
        let target = Formula::implies(c.clone(), items[k].clone());
        if let Some(l) = self.find(&target) {
            return l;
        }
        if n == 1 {
            return self.identity(&c);
        }
        if k == 0 {
            let rest = Formula::conj(&items[1..]);
            return self.axiom(Schema::AndElimL, &Bindings::new().a(items[0].clone()).b(rest));
        }
        let rest = Formula::conj(&items[1..]);
        let r = self.axiom(Schema::AndElimR, &Bindings::new().a(items[0].clone()).b(rest));
        let inner = self.proj(&items[1..], k - 1);
        self.ctx_apply(r, inner)
    }

    /// Copies a hypothesis-free lemma into this derivation with its atoms
    /// substituted, returning the line of the instantiated conclusion.
    pub fn lemma(&mut self, lemma: Lemma, args: &[Formula]) -> usize {
        self.instance_of(template(lemma), args)
    }

    fn instance_of(&mut self, t: &Derivation, args: &[Formula]) -> usize {
        let map = |n: &str| -> Option<Formula> {
            let idx = META.iter().position(|m| *m == n)?;
            Some(args[idx].clone())
        };
        let conclusion = t.lines.last().unwrap().formula.subst_atoms(&map);
        if let Some(i) = self.find(&conclusion) {
            return i;
        }
        let mut idx = Vec::with_capacity(t.lines.len());
        for l in &t.lines {
            let f = l.formula.subst_atoms(&map);
            idx.push(self.add(f, l.just.map_premises(|p| idx[p])));
        }
        *idx.last().unwrap()
    }

    /// `_|_ -> _|_`, as an ex falso instance.
    pub fn top(&mut self) -> usize {
        self.axiom(Schema::ExFalso, &Bindings::new().a(Formula::Bottom))
    }

    // ---- necessitation --------------------------------------------------

    /// Presets the proof term of a hypothesis line for [`Builder::necessitate`].
    pub fn set_hypothesis_term(&mut self, line: usize, term: ProofTerm, evidence_line: usize) {
        self.nec.insert(line, (term, evidence_line));
    }

    /// Constructive necessitation: a term `t` and a line `t:F` for the line
    /// `i` proving `F`. Hypotheses need a preset term.
    pub fn necessitate(&mut self, i: usize) -> (ProofTerm, usize) {
        if let Some(r) = self.nec.get(&i) {
            return r.clone();
        }
        assert!(self.system.is_explicit(), "necessitation needs proof terms");
        let mut needed = BTreeSet::from([i]);
        let mut stack = vec![i];
        while let Some(k) = stack.pop() {
            if self.nec.contains_key(&k) || self.quotable(k) {
                continue;
            }
            for p in self.lines[k].just.premises() {
                if needed.insert(p) {
                    stack.push(p);
                }
            }
        }
        for k in needed {
            if self.nec.contains_key(&k) {
                continue;
            }
            let r = match self.lines[k].just.clone() {
                _ if self.quotable(k) => self.quote(k),
                Justification::Hypothesis => {
                    panic!("hypothesis `{}` has no proof term", self.formula(k))
                }
                Justification::Axiom { .. } => self.axiom_nec(k),
                Justification::Cs | Justification::AxiomNec { .. } => self.quote(k),
                Justification::ModusPonens { minor, major } => {
                    let (ta, la) = self.nec[&minor].clone();
                    let (tb, lb) = self.nec[&major].clone();
                    let (a, b) = self.split_imp(major);
                    let e1 = self.axiom(
                        Schema::Application,
                        &Bindings::new().t(tb.clone()).s(ta.clone()).a(a).b(b),
                    );
                    let m = self.mp(lb, e1);
                    let line = self.mp(la, m);
                    (ProofTerm::app(tb, ta), line)
                }
                Justification::BoxNec { .. } => panic!("box necessitation in an explicit system"),
            };
            self.nec.insert(k, r);
        }
        self.nec[&i].clone()
    }

    /// A hypothesis-free line `t:A` with `t` ground is necessitated by
    /// `!t:t:A`. Variables in `t` would make the resulting term non-ground.
    fn quotable(&self, k: usize) -> bool {
        self.deps[k].is_empty() && matches!(&self.lines[k].formula, Formula::Evid(t, _) if t.is_ground())
    }

    fn quote(&mut self, k: usize) -> (ProofTerm, usize) {
        let Formula::Evid(t, a) = self.formula(k).clone() else { unreachable!() };
        let e3 = self.axiom(Schema::ProofChecker, &Bindings::new().t((*t).clone()).a((*a).clone()));
        let line = self.mp(k, e3);
        (ProofTerm::bang((*t).clone()), line)
    }

    // ---- finishing -------------------------------------------------------

    /// Applies a proof-variable substitution to every line and cached term.
    pub fn subst_term_vars(&mut self, map: &dyn Fn(&str) -> Option<ProofTerm>) {
        let mut changed = false;
        for l in &mut self.lines {
            if let Some(f) = l.formula.subst_term_vars_opt(map) {
                l.formula = f;
                changed = true;
            }
        }
        if !changed {
            return;
        }
        for (t, _) in self.nec.values_mut() {
            if let Some(n) = t.subst_vars(map) {
                *t = n;
            }
        }
        if let CsMode::Given(cs) = &mut self.mode {
            cs.subst_term_vars(map);
        }
        self.generated.subst_term_vars(map);
        self.proved.clear();
        self.hyps.clear();
        for (i, l) in self.lines.iter().enumerate() {
            if l.just == Justification::Hypothesis {
                self.hyps.entry(l.formula.clone()).or_insert(i);
            }
            if self.deps[i].is_empty() {
                self.proved.entry(l.formula.clone()).or_insert(i);
            }
        }
    }

    /// The derivation of line `i`, without unused lines.
    pub fn finish(&self, i: usize) -> Derivation {
        Derivation { lines: self.lines[..=i].to_vec() }.pruned(i)
    }

    /// Copies every line of `d`; returns the new index of each line.
    pub fn append(&mut self, d: &Derivation) -> Vec<usize> {
        let mut idx: Vec<usize> = Vec::with_capacity(d.len());
        for l in &d.lines {
            let j = l.just.map_premises(|p| idx[p]);
            idx.push(self.add(l.formula.clone(), j));
        }
        idx
    }

    pub fn into_derivation(self) -> Derivation {
        Derivation { lines: self.lines }
    }
}

/// Reusable propositional lemmas, over the metavariables `?A ?B ?C`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Lemma {
    /// `(A & B -> C) -> A -> B -> C`
    Curry,
    /// `~(A -> B) -> A`
    NotImpAntecedent,
    /// `~(A -> B) -> ~B`
    NotImpConsequent,
    /// `~(A | B) -> ~A`
    NotOrLeft,
    /// `~(A | B) -> ~B`
    NotOrRight,
    /// `A | ~A`
    ExcludedMiddle,
    /// `(A -> B) -> ~A | B`
    ImpToOr,
    /// `~(A & B) -> ~A | ~B`
    NotAndToOr,
}

const META: [&str; 3] = ["?A", "?B", "?C"];

fn template(lemma: Lemma) -> &'static Derivation {
    static TABLE: OnceLock<HashMap<Lemma, Derivation>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        use Lemma::*;
        [Curry, NotImpAntecedent, NotImpConsequent, NotOrLeft, NotOrRight, ExcludedMiddle, ImpToOr, NotAndToOr]
            .into_iter()
            .map(|l| (l, build_template(l)))
            .collect()
    });
    &table[&lemma]
}

fn build_template(lemma: Lemma) -> Derivation {
    let dis = |b: &mut Builder, target, hyp| {
        super::deduction::discharge_in(b, target, hyp).expect("template discharge")
    };
    let a = Formula::atom("?A");
    let b = Formula::atom("?B");
    let c = Formula::atom("?C");
    let not = Formula::not;
    // Templates use only propositional schemas; a classical system admits
    // all of them.
    let mut bd = Builder::new(SystemId::S4vMinus);
    let bb = &mut bd;
    let conclusion = match lemma {
        Lemma::Curry => {
            let h = bb.hyp(Formula::implies(Formula::and(a.clone(), b.clone()), c.clone()));
            let ha = bb.hyp(a.clone());
            let hb = bb.hyp(b.clone());
            let intro = bb.axiom(Schema::AndIntro, &Bindings::new().a(a.clone()).b(b.clone()));
            let m = bb.mp(ha, intro);
            let ab = bb.mp(hb, m);
            let r = bb.mp(ab, h);
            let r = dis(bb, r, hb);
            let r = dis(bb, r, ha);
            dis(bb, r, h)
        }
        Lemma::NotImpAntecedent => {
            let h = bb.hyp(not(Formula::implies(a.clone(), b.clone())));
            let n = bb.hyp(not(a.clone()));
            let ha = bb.hyp(a.clone());
            let bot = bb.mp(ha, n);
            let efq = bb.axiom(Schema::ExFalso, &Bindings::new().a(b.clone()));
            let rb = bb.mp(bot, efq);
            let imp = dis(bb, rb, ha);
            let bot = bb.mp(imp, h);
            let nn = dis(bb, bot, n);
            let dne = bb.axiom(Schema::DoubleNegation, &Bindings::new().a(a.clone()));
            let ra = bb.mp(nn, dne);
            dis(bb, ra, h)
        }
        Lemma::NotImpConsequent => {
            let h = bb.hyp(not(Formula::implies(a.clone(), b.clone())));
            let hb = bb.hyp(b.clone());
            let k = bb.axiom(Schema::K, &Bindings::new().a(b.clone()).b(a.clone()));
            let imp = bb.mp(hb, k);
            let bot = bb.mp(imp, h);
            let nb = dis(bb, bot, hb);
            dis(bb, nb, h)
        }
        Lemma::NotOrLeft | Lemma::NotOrRight => {
            let h = bb.hyp(not(Formula::or(a.clone(), b.clone())));
            let (schema, x) = if lemma == Lemma::NotOrLeft {
                (Schema::OrIntroL, a.clone())
            } else {
                (Schema::OrIntroR, b.clone())
            };
            let hx = bb.hyp(x);
            let intro = bb.axiom(schema, &Bindings::new().a(a.clone()).b(b.clone()));
            let or = bb.mp(hx, intro);
            let bot = bb.mp(or, h);
            let nx = dis(bb, bot, hx);
            dis(bb, nx, h)
        }
        Lemma::ExcludedMiddle => {
            let lem = Formula::or(a.clone(), not(a.clone()));
            let n = bb.hyp(not(lem.clone()));
            let ha = bb.hyp(a.clone());
            let il = bb.axiom(Schema::OrIntroL, &Bindings::new().a(a.clone()).b(not(a.clone())));
            let or = bb.mp(ha, il);
            let bot = bb.mp(or, n);
            let na = dis(bb, bot, ha);
            let ir = bb.axiom(Schema::OrIntroR, &Bindings::new().a(a.clone()).b(not(a.clone())));
            let or = bb.mp(na, ir);
            let bot = bb.mp(or, n);
            let nn = dis(bb, bot, n);
            let dne = bb.axiom(Schema::DoubleNegation, &Bindings::new().a(lem));
            bb.mp(nn, dne)
        }
        Lemma::ImpToOr => {
            let goal = Formula::or(not(a.clone()), b.clone());
            let h = bb.hyp(Formula::implies(a.clone(), b.clone()));
            let ha = bb.hyp(a.clone());
            let rb = bb.mp(ha, h);
            let ir = bb.axiom(Schema::OrIntroR, &Bindings::new().a(not(a.clone())).b(b.clone()));
            let r = bb.mp(rb, ir);
            let case_a = dis(bb, r, ha);
            let case_na = bb.axiom(Schema::OrIntroL, &Bindings::new().a(not(a.clone())).b(b.clone()));
            let elim = bb.axiom(
                Schema::OrElim,
                &Bindings::new().a(a.clone()).b(not(a.clone())).c(goal),
            );
            let m = bb.mp(case_a, elim);
            let m = bb.mp(case_na, m);
            let lem = bb.instance_of(&build_template(Lemma::ExcludedMiddle), std::slice::from_ref(&a));
            let r = bb.mp(lem, m);
            dis(bb, r, h)
        }
        Lemma::NotAndToOr => {
            let goal = Formula::or(not(a.clone()), not(b.clone()));
            let h = bb.hyp(not(Formula::and(a.clone(), b.clone())));
            let ha = bb.hyp(a.clone());
            let hb = bb.hyp(b.clone());
            let intro = bb.axiom(Schema::AndIntro, &Bindings::new().a(a.clone()).b(b.clone()));
            let m = bb.mp(ha, intro);
            let ab = bb.mp(hb, m);
            let bot = bb.mp(ab, h);
            let nb = dis(bb, bot, hb);
            let ir = bb.axiom(Schema::OrIntroR, &Bindings::new().a(not(a.clone())).b(not(b.clone())));
            let r = bb.mp(nb, ir);
            let case_a = dis(bb, r, ha);
            let case_na =
                bb.axiom(Schema::OrIntroL, &Bindings::new().a(not(a.clone())).b(not(b.clone())));
            let elim = bb.axiom(
                Schema::OrElim,
                &Bindings::new().a(a.clone()).b(not(a.clone())).c(goal),
            );
            let m = bb.mp(case_a, elim);
            let m = bb.mp(case_na, m);
            let lem = bb.instance_of(&build_template(Lemma::ExcludedMiddle), std::slice::from_ref(&a));
            let r = bb.mp(lem, m);
            dis(bb, r, h)
        }
    };
    let d = bd.finish(conclusion);
    debug_assert!(d.hypotheses().is_empty());
    d
}
