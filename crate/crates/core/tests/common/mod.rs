//! Generators and oracles shared by the integration tests.
#![allow(dead_code)]

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use iel_core::formula::{parse, Formula, Language, ProofTerm};
use iel_core::hilbert::{Bindings, Builder, Derivation, Justification, Schema, SystemId};
use iel_core::sequent::{prove, Budget, Node, ProveOutcome, RuleId, Sequent, SequentSystem};
use iel_core::translate::{forgetful_projection, godel_tr};

pub fn f(s: &str, lang: Language) -> Formula {
    parse(s, lang).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn iel(s: &str) -> Formula {
    f(s, Language::Iel)
}

pub fn goal(f: &Formula) -> Sequent {
    Sequent::new(vec![], vec![f.clone()])
}

pub fn timed<T>(op: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let r = op();
    (r, t.elapsed())
}

// ---- corpora ------------------------------------------------------------

/// Theorems of IEL-minus.
pub const IEL_MINUS_THEOREMS: [&str; 12] = [
    "K(p -> q) -> K p -> K q",
    "K(p & q -> r) -> K(p & q) -> K r",
    "p -> K p",
    "p & q -> K(p & q)",
    "~p -> K ~p",
    "K p -> K K p",
    "K(p & q) -> K p & K q",
    "K p & K q -> K(p & q)",
    "K(p -> q) -> K(q -> r) -> K(p -> r)",
    "K p -> K(q -> p)",
    "K p | K q -> K(p | q)",
    "K(p -> q) -> p -> K q",
];

/// Theorems of IEL outside IEL-minus.
pub const IEL_THEOREMS: [&str; 6] = [
    "~K _|_",
    "K p -> ~~p",
    "~p -> ~K p",
    "~~(K p -> p)",
    "K ~p -> ~p",
    "~(K p & ~p)",
];

/// Non-theorems of IEL.
pub const IEL_NON_THEOREMS: [&str; 3] = ["K p -> p", "~~p -> p", "p | ~p"];

// ---- random formulas, terms and derivations ----------------------------

pub struct Gen {
    pub rng: ChaCha8Rng,
}

const ATOMS: [&str; 3] = ["p", "q", "r"];
const VARS: [&str; 3] = ["x", "y", "z"];

pub fn split_evid(f: &Formula) -> (ProofTerm, Formula) {
    match f {
        Formula::Evid(t, a) => ((**t).clone(), (**a).clone()),
        other => panic!("not evidence: {other}"),
    }
}

fn split_imp(f: &Formula) -> (Formula, Formula) {
    match f {
        Formula::Implies(a, b) => ((**a).clone(), (**b).clone()),
        other => panic!("not an implication: {other}"),
    }
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn atom(&mut self) -> Formula {
        Formula::atom(ATOMS.choose(&mut self.rng).unwrap())
    }

    pub fn term(&mut self, depth: usize) -> ProofTerm {
        if depth == 0 || self.rng.gen_bool(0.5) {
            return ProofTerm::var(VARS.choose(&mut self.rng).unwrap());
        }
        match self.rng.gen_range(0..3) {
            0 => ProofTerm::app(self.term(depth - 1), self.term(depth - 1)),
            1 => ProofTerm::plus(self.term(depth - 1), self.term(depth - 1)),
            _ => ProofTerm::bang(self.term(depth - 1)),
        }
    }

    /// A random formula of `lang` with at most `depth` nested connectives.
    pub fn formula(&mut self, lang: Language, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return if self.rng.gen_bool(0.15) { Formula::bottom() } else { self.atom() };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..6) {
            0 => Formula::and(self.formula(lang, d), self.formula(lang, d)),
            1 => Formula::or(self.formula(lang, d), self.formula(lang, d)),
            2 => Formula::implies(self.formula(lang, d), self.formula(lang, d)),
            3 => Formula::not(self.formula(lang, d)),
            _ => match lang {
                Language::Iel => Formula::know(self.formula(lang, d)),
                Language::Modal => {
                    if self.rng.gen_bool(0.5) {
                        Formula::boxed(self.formula(lang, d))
                    } else {
                        Formula::ver(self.formula(lang, d))
                    }
                }
                Language::Explicit => {
                    if self.rng.gen_bool(0.6) {
                        let t = self.term(2);
                        Formula::evid(t, self.formula(lang, d))
                    } else {
                        Formula::ver(self.formula(lang, d))
                    }
                }
            },
        }
    }

    fn bindings(&mut self, lang: Language) -> Bindings {
        let (a, b, c) = (self.formula(lang, 2), self.formula(lang, 2), self.formula(lang, 1));
        let (t, s) = (self.term(1), self.term(1));
        Bindings::new().a(a).b(b).c(c).t(t).s(s)
    }

    /// A random instance of a random axiom schema of the builder's system.
    pub fn axiom(&mut self, b: &mut Builder) -> usize {
        let sys = b.system();
        let schema = *sys.schemas().choose(&mut self.rng).unwrap();
        let bind = self.bindings(sys.language());
        b.axiom(schema, &bind)
    }

    /// A line `t:A` of an explicit system, at most `depth` inferences deep.
    pub fn evidence(&mut self, b: &mut Builder, depth: usize) -> usize {
        if depth < 2 || self.rng.gen_bool(0.3) {
            let ax = self.axiom(b);
            return b.axiom_nec(ax).1;
        }
        match self.rng.gen_range(0..3) {
            0 => {
                let e = self.evidence(b, depth - 1);
                let (t, a) = split_evid(b.formula(e));
                let ax = b.axiom(Schema::ProofChecker, &Bindings::new().t(t).a(a));
                b.mp(e, ax)
            }
            1 => {
                let e = self.evidence(b, depth - 1);
                let (t, a) = split_evid(b.formula(e));
                let s = self.term(1);
                let schema = if self.rng.gen_bool(0.5) { Schema::PlusLeft } else { Schema::PlusRight };
                let ax = b.axiom(schema, &Bindings::new().t(t).s(s).a(a));
                b.mp(e, ax)
            }
            _ => {
                // c:(A -> B -> A) and t:A give (c * t):(B -> A)
                let e = self.evidence(b, depth - 2);
                let (t, a) = split_evid(b.formula(e));
                let extra = self.formula(b.system().language(), 1);
                let k = b.axiom(Schema::K, &Bindings::new().a(a.clone()).b(extra.clone()));
                let (c, cl) = b.axiom_nec(k);
                let app = b.axiom(
                    Schema::Application,
                    &Bindings::new().t(c).s(t).a(a.clone()).b(Formula::implies(extra, a)),
                );
                let m = b.mp(cl, app);
                b.mp(e, m)
            }
        }
    }

    /// A theorem of the builder's system, at most `depth` inferences deep.
    pub fn theorem(&mut self, b: &mut Builder, depth: usize) -> usize {
        let sys = b.system();
        if depth == 0 || self.rng.gen_bool(0.15) {
            return self.axiom(b);
        }
        let lang = sys.language();
        let choices: &[u8] = if sys.has_schema(Schema::EvidenceV) {
            &[0, 1, 2, 3, 4, 5, 6]
        } else if sys.is_explicit() {
            &[0, 1, 2, 3, 4]
        } else {
            &[0, 1, 2, 7]
        };
        match *choices.choose(&mut self.rng).unwrap() {
            0 => {
                let x = self.theorem(b, depth - 1);
                let y = self.formula(lang, 2);
                let k = b.axiom(Schema::K, &Bindings::new().a(b.formula(x).clone()).b(y));
                b.mp(x, k)
            }
            1 if depth >= 2 => {
                let x = self.theorem(b, depth - 2);
                let y = self.theorem(b, depth - 2);
                let (fx, fy) = (b.formula(x).clone(), b.formula(y).clone());
                let ai = b.axiom(Schema::AndIntro, &Bindings::new().a(fx).b(fy));
                let m = b.mp(x, ai);
                b.mp(y, m)
            }
            2 => {
                let x = self.theorem(b, depth - 1);
                let y = self.formula(lang, 2);
                let fx = b.formula(x).clone();
                let ax = if self.rng.gen_bool(0.5) {
                    b.axiom(Schema::OrIntroL, &Bindings::new().a(fx).b(y))
                } else {
                    b.axiom(Schema::OrIntroR, &Bindings::new().a(y).b(fx))
                };
                b.mp(x, ax)
            }
            3 => self.evidence(b, depth),
            4 => {
                let e = self.evidence(b, depth - 1);
                let (t, a) = split_evid(b.formula(e));
                let ax = b.axiom(Schema::Reflection, &Bindings::new().t(t).a(a));
                b.mp(e, ax)
            }
            5 => {
                let e = self.evidence(b, depth - 1);
                let (t, a) = split_evid(b.formula(e));
                let ax = b.axiom(Schema::EvidenceV, &Bindings::new().t(t).a(a));
                b.mp(e, ax)
            }
            6 if depth >= 3 => {
                // V(A -> B -> A) and V A give V(B -> A)
                let e = self.evidence(b, depth - 2);
                let (t, a) = split_evid(b.formula(e));
                let y = self.formula(lang, 1);
                let k = b.axiom(Schema::K, &Bindings::new().a(a.clone()).b(y));
                let (ka, kb) = split_imp(b.formula(k));
                let (c, cl) = b.axiom_nec(k);
                let v1 = b.axiom(Schema::EvidenceV, &Bindings::new().t(c).a(b.formula(k).clone()));
                let v_imp = b.mp(cl, v1);
                let v2 = b.axiom(Schema::EvidenceV, &Bindings::new().t(t).a(a));
                let va = b.mp(e, v2);
                let vk = b.axiom(Schema::VK, &Bindings::new().a(ka).b(kb));
                let m = b.mp(v_imp, vk);
                b.mp(va, m)
            }
            7 if sys.has_box() => {
                let x = self.theorem(b, depth - 1);
                let fx = b.formula(x).clone();
                b.add(Formula::boxed(fx), Justification::BoxNec { premise: x })
            }
            7 => {
                let x = self.theorem(b, depth - 1);
                let fx = b.formula(x).clone();
                let ax = b.axiom(Schema::CoReflection, &Bindings::new().a(fx));
                b.mp(x, ax)
            }
            _ => self.theorem(b, depth - 1),
        }
    }

    /// A derivation of some `F` from the single hypothesis `A`, using it at
    /// least once, together with the index of the hypothesis line.
    pub fn with_hypothesis(&mut self, sys: SystemId, steps: usize) -> (Derivation, usize) {
        let lang = sys.language();
        let mut b = Builder::new(sys);
        let a = if sys.is_explicit() && self.rng.gen_bool(0.5) {
            let t = ProofTerm::var(VARS.choose(&mut self.rng).unwrap());
            Formula::evid(t, self.formula(lang, 2))
        } else {
            self.formula(lang, 2)
        };
        let h = b.hyp(a);
        let mut cur = h;
        for _ in 0..steps {
            let fc = b.formula(cur).clone();
            cur = match self.rng.gen_range(0..5) {
                0 => {
                    let y = self.formula(lang, 1);
                    let k = b.axiom(Schema::K, &Bindings::new().a(fc).b(y));
                    b.mp(cur, k)
                }
                1 => {
                    let t = self.theorem(&mut b, 2);
                    let ft = b.formula(t).clone();
                    let ai = b.axiom(Schema::AndIntro, &Bindings::new().a(fc).b(ft));
                    let m = b.mp(cur, ai);
                    b.mp(t, m)
                }
                2 => {
                    let y = self.formula(lang, 1);
                    let ax = b.axiom(Schema::OrIntroL, &Bindings::new().a(fc).b(y));
                    b.mp(cur, ax)
                }
                3 if matches!(fc, Formula::Evid(..)) => {
                    let (t, a) = split_evid(&fc);
                    let options: Vec<Schema> = [Schema::ProofChecker, Schema::Reflection, Schema::EvidenceV]
                        .into_iter()
                        .filter(|s| sys.has_schema(*s))
                        .collect();
                    let schema = *options.choose(&mut self.rng).unwrap();
                    let ax = b.axiom(schema, &Bindings::new().t(t).a(a));
                    b.mp(cur, ax)
                }
                3 if matches!(sys, SystemId::IelMinus | SystemId::Iel) => {
                    let ax = b.axiom(Schema::CoReflection, &Bindings::new().a(fc));
                    b.mp(cur, ax)
                }
                3 if sys.has_box() => {
                    let bx = self.theorem(&mut b, 1);
                    let fb = b.formula(bx).clone();
                    let boxed = b.add(Formula::boxed(fb.clone()), Justification::BoxNec { premise: bx });
                    let ax2 = b.axiom(Schema::BoxV, &Bindings::new().a(fb.clone()));
                    let v = b.mp(boxed, ax2);
                    let ai = b.axiom(Schema::AndIntro, &Bindings::new().a(fc).b(Formula::ver(fb)));
                    let m = b.mp(cur, ai);
                    b.mp(v, m)
                }
                _ => {
                    // A ∧ B -> A against a conjunction, otherwise S-combination
                    if let Formula::And(l, r) = &fc {
                        let ax = b.axiom(Schema::AndElimL, &Bindings::new().a((**l).clone()).b((**r).clone()));
                        b.mp(cur, ax)
                    } else {
                        let y = self.formula(lang, 1);
                        let k = b.axiom(Schema::K, &Bindings::new().a(fc.clone()).b(y.clone()));
                        let kk = b.mp(cur, k);
                        let i = b.identity(&y);
                        let ai = b.axiom(
                            Schema::AndIntro,
                            &Bindings::new().a(b.formula(kk).clone()).b(b.formula(i).clone()),
                        );
                        let m = b.mp(kk, ai);
                        b.mp(i, m)
                    }
                }
            };
        }
        let d = b.finish(cur);
        let hyp = d.lines.iter().position(|l| l.just == Justification::Hypothesis).expect("hypothesis used");
        (d, hyp)
    }
}

/// Longest chain of inferences ending in the last line.
pub fn derivation_depth(d: &Derivation) -> usize {
    let mut depth = vec![0usize; d.len()];
    for (i, l) in d.lines.iter().enumerate() {
        depth[i] = l.just.premises().iter().map(|&p| depth[p] + 1).max().unwrap_or(0);
    }
    depth.last().copied().unwrap_or(0)
}

/// Sequent system matching a Hilbert system with boxes or evidence.
pub fn matching_sequent_system(sys: SystemId) -> SequentSystem {
    match sys {
        SystemId::S4vMinus | SystemId::LpvMinus | SystemId::IelMinus => SequentSystem::S4vMinusG,
        _ => SequentSystem::S4vG,
    }
}

// ---- independent validators --------------------------------------------

/// Semantic image of a formula of `sys` in the modal language, for the
/// prover oracle.
pub fn modal_image(f: &Formula, sys: SystemId) -> Option<Formula> {
    match sys.language() {
        Language::Iel => godel_tr(f).ok(),
        Language::Modal => Some(f.clone()),
        Language::Explicit => forgetful_projection(f).ok(),
    }
}

pub fn provable(f: &Formula, system: SequentSystem) -> bool {
    matches!(prove(&goal(f), system, Budget::default()), ProveOutcome::Proved(_))
}

/// Replays a hypothesis-free derivation line by line without the schema
/// matcher: inferences are checked structurally and every axiom line must
/// have a modal image that the prover establishes.
pub fn replay_valid(d: &Derivation, sys: SystemId) -> Result<(), String> {
    let ss = matching_sequent_system(sys);
    for (i, l) in d.lines.iter().enumerate() {
        if !l.formula.in_language(sys.language()) {
            return Err(format!("line {i} outside the language"));
        }
        if l.just.premises().iter().any(|&p| p >= i) {
            return Err(format!("line {i} refers forward"));
        }
        let ok = match &l.just {
            Justification::Hypothesis | Justification::Cs => false,
            Justification::Axiom { .. } => modal_image(&l.formula, sys).is_some_and(|m| provable(&m, ss)),
            Justification::ModusPonens { minor, major } => {
                d.lines[*major].formula == Formula::implies(d.lines[*minor].formula.clone(), l.formula.clone())
            }
            Justification::BoxNec { premise } => {
                sys.has_box() && l.formula == Formula::boxed(d.lines[*premise].formula.clone())
            }
            Justification::AxiomNec { premise } => {
                matches!(d.lines[*premise].just, Justification::Axiom { .. })
                    && matches!(&l.formula, Formula::Evid(t, a)
                        if matches!(**t, ProofTerm::Const(_)) && **a == d.lines[*premise].formula)
            }
        };
        if !ok {
            return Err(format!("line {i} does not replay"));
        }
    }
    Ok(())
}

/// Every node of a sequent derivation is a provable sequent and the rule
/// names are drawn from the system. Independent of the rule checker.
pub fn sequent_nodes_valid(n: &Node, system: SequentSystem) -> bool {
    n.nodes().iter().all(|m| {
        system.allows(m.rule)
            && m.sequent.in_language().is_none()
            && matches!(prove(&m.sequent, system, Budget::default()), ProveOutcome::Proved(_))
    })
}

// ---- mutations -----------------------------------------------------------

impl Gen {
    /// Alters one node of `f`: renames an atom, swaps a connective, wraps
    /// or unwraps a modality, or replaces a subformula.
    pub fn mutate_formula(&mut self, f: &Formula, lang: Language) -> Formula {
        let positions = positions(f);
        loop {
            let pos = positions.choose(&mut self.rng).unwrap().clone();
            let sub = f.at(&pos).unwrap().clone();
            let new = match self.rng.gen_range(0..4) {
                0 => match &sub {
                    Formula::Atom(_) => self.atom(),
                    Formula::And(a, b) => Formula::or((**a).clone(), (**b).clone()),
                    Formula::Or(a, b) => Formula::implies((**a).clone(), (**b).clone()),
                    Formula::Implies(a, b) => Formula::and((**a).clone(), (**b).clone()),
                    Formula::Know(a) | Formula::Box(a) | Formula::Ver(a) => (**a).clone(),
                    Formula::Evid(t, a) => Formula::evid(ProofTerm::bang((**t).clone()), (**a).clone()),
                    Formula::Bottom => self.atom(),
                },
                1 => match lang {
                    Language::Iel => Formula::know(sub.clone()),
                    Language::Modal => Formula::boxed(sub.clone()),
                    Language::Explicit => Formula::ver(sub.clone()),
                },
                2 => Formula::not(sub.clone()),
                _ => self.formula(lang, 2),
            };
            if new != sub {
                return replace_at(f, &pos, new);
            }
        }
    }

    /// One random change to one line of `d`.
    pub fn mutate_derivation(&mut self, d: &Derivation, sys: SystemId) -> Derivation {
        loop {
            let mut m = d.clone();
            let i = self.rng.gen_range(0..m.len());
            let line = &mut m.lines[i];
            match self.rng.gen_range(0..5) {
                0 => {
                    if let Justification::ModusPonens { minor, major } = line.just {
                        line.just = Justification::ModusPonens { minor: major, major: minor };
                    }
                }
                1 => {
                    let n = if i == 0 { 1 } else { i };
                    let r = self.rng.gen_range(0..n);
                    line.just = match line.just {
                        Justification::ModusPonens { major, .. } if self.rng.gen_bool(0.5) => {
                            Justification::ModusPonens { minor: r, major }
                        }
                        Justification::ModusPonens { minor, .. } => Justification::ModusPonens { minor, major: r },
                        Justification::AxiomNec { .. } => Justification::AxiomNec { premise: r },
                        Justification::BoxNec { .. } => Justification::BoxNec { premise: r },
                        ref other => other.clone(),
                    };
                }
                2 => {
                    let schemas = sys.schemas();
                    line.just = match line.just {
                        Justification::Axiom { .. } => {
                            Justification::axiom(*schemas.choose(&mut self.rng).unwrap())
                        }
                        Justification::ModusPonens { .. } => Justification::Axiom { schema: None },
                        Justification::AxiomNec { premise } | Justification::BoxNec { premise } => {
                            Justification::ModusPonens { minor: premise, major: premise }
                        }
                        ref other => other.clone(),
                    };
                }
                _ => {
                    line.formula = self.mutate_formula(&line.formula, sys.language());
                }
            }
            if m != *d {
                return m;
            }
        }
    }

    /// One random change to one node of a sequent derivation.
    pub fn mutate_node(&mut self, root: &Node) -> Node {
        let count = root.size();
        loop {
            let mut m = root.clone();
            let k = self.rng.gen_range(0..count);
            let node = nth_node(&mut m, k);
            match self.rng.gen_range(0..7) {
                0 | 1 => {
                    let side = if self.rng.gen_bool(0.5) { &mut node.sequent.ant } else { &mut node.sequent.succ };
                    if let Some(slot) = side.choose_mut(&mut self.rng) {
                        *slot = self.mutate_formula(slot, Language::Modal);
                    }
                }
                2 => {
                    let side = if self.rng.gen_bool(0.5) { &mut node.sequent.ant } else { &mut node.sequent.succ };
                    if !side.is_empty() {
                        let i = self.rng.gen_range(0..side.len());
                        side.remove(i);
                    }
                }
                3 => {
                    let extra = self.formula(Language::Modal, 2);
                    if self.rng.gen_bool(0.5) {
                        node.sequent.ant.push(extra);
                    } else {
                        node.sequent.succ.push(extra);
                    }
                }
                4 => node.rule = *RuleId::ALL.choose(&mut self.rng).unwrap(),
                5 => {
                    let n = node.sequent.ant.len().max(node.sequent.succ.len()).max(1);
                    node.principal = Some(self.rng.gen_range(0..n + 1));
                }
                _ => {
                    if node.premises.len() == 2 {
                        node.premises.swap(0, 1);
                    } else if !node.premises.is_empty() {
                        let p = node.premises[0].clone();
                        if self.rng.gen_bool(0.5) {
                            node.premises.push(p);
                        } else {
                            node.premises.clear();
                        }
                    }
                }
            }
            if m != *root {
                return m;
            }
        }
    }
}

fn nth_node(n: &mut Node, k: usize) -> &mut Node {
    if k == 0 {
        return n;
    }
    let mut k = k - 1;
    for p in &mut n.premises {
        let size = p.size();
        if k < size {
            return nth_node(p, k);
        }
        k -= size;
    }
    unreachable!("index within the tree")
}

pub fn positions(f: &Formula) -> Vec<Vec<u8>> {
    fn go(f: &Formula, path: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        out.push(path.clone());
        for (i, c) in f.children().into_iter().enumerate() {
            path.push(i as u8);
            go(c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(f, &mut Vec::new(), &mut out);
    out
}

pub fn replace_at(f: &Formula, pos: &[u8], new: Formula) -> Formula {
    let Some((&i, rest)) = pos.split_first() else {
        return new;
    };
    let sub = |c: &Formula| replace_at(c, rest, new.clone());
    match f {
        Formula::And(a, b) if i == 0 => Formula::and(sub(a), (**b).clone()),
        Formula::And(a, b) => Formula::and((**a).clone(), sub(b)),
        Formula::Or(a, b) if i == 0 => Formula::or(sub(a), (**b).clone()),
        Formula::Or(a, b) => Formula::or((**a).clone(), sub(b)),
        Formula::Implies(a, b) if i == 0 => Formula::implies(sub(a), (**b).clone()),
        Formula::Implies(a, b) => Formula::implies((**a).clone(), sub(b)),
        Formula::Know(a) => Formula::know(sub(a)),
        Formula::Box(a) => Formula::boxed(sub(a)),
        Formula::Ver(a) => Formula::ver(sub(a)),
        Formula::Evid(t, a) => Formula::evid((**t).clone(), sub(a)),
        Formula::Atom(_) | Formula::Bottom => f.clone(),
    }
}
