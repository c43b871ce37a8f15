//! Syntax trees shared by the three object languages.
//!
//! A single [`Formula`] type covers the intuitionistic epistemic language
//! (with `K`), the modal verification language (with `[]` and `V`) and the
//! explicit language (with `V` and `t:A`). Membership in each language is a
//! predicate on the tree, see [`Formula::in_language`].
//!
//! Negation is not a constructor: `~A` is `A -> _|_`.

mod parse;
mod polarity;
mod print;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use parse::{parse, parse_sequent_sides, parse_term, ParseError, Parser};
pub use polarity::{box_positions, polarity_of, Polarity, Position};
pub(crate) use polarity::polarity_from;
pub use print::{print, print_term, PrintOptions};

/// Proof terms: variables, constants, application, sum and proof checker.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ProofTerm {
    Var(Arc<str>),
    Const(Arc<str>),
    /// `t * s`
    App(Arc<ProofTerm>, Arc<ProofTerm>),
    /// `t + s`
    Plus(Arc<ProofTerm>, Arc<ProofTerm>),
    /// `!t`
    Bang(Arc<ProofTerm>),
}

impl ProofTerm {
    pub fn var(name: &str) -> Self {
        ProofTerm::Var(name.into())
    }

    pub fn constant(name: &str) -> Self {
        ProofTerm::Const(name.into())
    }

    pub fn app(l: ProofTerm, r: ProofTerm) -> Self {
        ProofTerm::App(Arc::new(l), Arc::new(r))
    }

    pub fn plus(l: ProofTerm, r: ProofTerm) -> Self {
        ProofTerm::Plus(Arc::new(l), Arc::new(r))
    }

    pub fn bang(t: ProofTerm) -> Self {
        ProofTerm::Bang(Arc::new(t))
    }

    /// A term is ground iff it mentions no proof variable.
    pub fn is_ground(&self) -> bool {
        match self {
            ProofTerm::Var(_) => false,
            ProofTerm::Const(_) => true,
            ProofTerm::App(l, r) | ProofTerm::Plus(l, r) => l.is_ground() && r.is_ground(),
            ProofTerm::Bang(t) => t.is_ground(),
        }
    }

    pub fn collect_names(&self, vars: &mut BTreeSet<Arc<str>>, consts: &mut BTreeSet<Arc<str>>) {
        match self {
            ProofTerm::Var(n) => {
                vars.insert(n.clone());
            }
            ProofTerm::Const(n) => {
                consts.insert(n.clone());
            }
            ProofTerm::App(l, r) | ProofTerm::Plus(l, r) => {
                l.collect_names(vars, consts);
                r.collect_names(vars, consts);
            }
            ProofTerm::Bang(t) => t.collect_names(vars, consts),
        }
    }

    pub fn mentions_var(&self, pred: &dyn Fn(&str) -> bool) -> bool {
        match self {
            ProofTerm::Var(n) => pred(n),
            ProofTerm::Const(_) => false,
            ProofTerm::App(l, r) | ProofTerm::Plus(l, r) => {
                l.mentions_var(pred) || r.mentions_var(pred)
            }
            ProofTerm::Bang(t) => t.mentions_var(pred),
        }
    }

    /// Replaces proof variables by terms. Returns `None` when nothing changed.
    pub fn subst_vars(&self, map: &dyn Fn(&str) -> Option<ProofTerm>) -> Option<ProofTerm> {
        match self {
            ProofTerm::Var(n) => map(n),
            ProofTerm::Const(_) => None,
            ProofTerm::App(l, r) | ProofTerm::Plus(l, r) => {
                let nl = l.subst_vars(map);
                let nr = r.subst_vars(map);
                if nl.is_none() && nr.is_none() {
                    return None;
                }
                let nl = nl.map(Arc::new).unwrap_or_else(|| l.clone());
                let nr = nr.map(Arc::new).unwrap_or_else(|| r.clone());
                Some(match self {
                    ProofTerm::App(..) => ProofTerm::App(nl, nr),
                    _ => ProofTerm::Plus(nl, nr),
                })
            }
            ProofTerm::Bang(t) => t.subst_vars(map).map(|t| ProofTerm::Bang(Arc::new(t))),
        }
    }
}

impl fmt::Display for ProofTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

/// One syntax tree for all three object languages.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Formula {
    Atom(Arc<str>),
    Bottom,
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    /// `K A`
    Know(Arc<Formula>),
    /// `[]A`
    Box(Arc<Formula>),
    /// `V A`
    Ver(Arc<Formula>),
    /// `t:A`
    Evid(Arc<ProofTerm>, Arc<Formula>),
}

/// The three object languages.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    /// Intuitionistic epistemic language: `K`, no `[]`, `V` or `t:A`.
    Iel,
    /// Modal verification language: `[]` and `V`, no `K` or `t:A`.
    Modal,
    /// Explicit language: `V` and `t:A`, no `K` or `[]`.
    Explicit,
}

impl Language {
    pub const ALL: [Language; 3] = [Language::Iel, Language::Modal, Language::Explicit];

    pub fn name(self) -> &'static str {
        match self {
            Language::Iel => "iel",
            Language::Modal => "modal",
            Language::Explicit => "explicit",
        }
    }
}

impl std::str::FromStr for Language {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "iel" => Ok(Language::Iel),
            "modal" => Ok(Language::Modal),
            "explicit" => Ok(Language::Explicit),
            other => Err(format!("unknown language `{other}` (expected iel, modal or explicit)")),
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Formula {
    pub fn atom(name: &str) -> Self {
        Formula::Atom(name.into())
    }

    pub fn bottom() -> Self {
        Formula::Bottom
    }

    /// `_|_ -> _|_`
    pub fn top() -> Self {
        Formula::implies(Formula::Bottom, Formula::Bottom)
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Arc::new(l), Arc::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Arc::new(l), Arc::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::Implies(Arc::new(l), Arc::new(r))
    }

    pub fn not(f: Formula) -> Self {
        Formula::implies(f, Formula::Bottom)
    }

    pub fn know(f: Formula) -> Self {
        Formula::Know(Arc::new(f))
    }

    pub fn boxed(f: Formula) -> Self {
        Formula::Box(Arc::new(f))
    }

    pub fn ver(f: Formula) -> Self {
        Formula::Ver(Arc::new(f))
    }

    pub fn evid(t: ProofTerm, f: Formula) -> Self {
        Formula::Evid(Arc::new(t), Arc::new(f))
    }

    /// Right-nested conjunction; the empty conjunction is `_|_ -> _|_`.
    pub fn conj(items: &[Formula]) -> Self {
        match items.split_last() {
            None => Formula::top(),
            Some((last, rest)) => rest
                .iter()
                .rev()
                .fold(last.clone(), |acc, f| Formula::and(f.clone(), acc)),
        }
    }

    /// Right-nested disjunction; the empty disjunction is `_|_`.
    pub fn disj(items: &[Formula]) -> Self {
        match items.split_last() {
            None => Formula::Bottom,
            Some((last, rest)) => rest
                .iter()
                .rev()
                .fold(last.clone(), |acc, f| Formula::or(f.clone(), acc)),
        }
    }

    /// `A` when this formula is `A -> _|_`.
    pub fn negated(&self) -> Option<&Formula> {
        match self {
            Formula::Implies(a, b) if **b == Formula::Bottom => Some(a),
            _ => None,
        }
    }

    pub fn is_top(&self) -> bool {
        matches!(self.negated(), Some(Formula::Bottom))
    }

    /// Immediate subformulas, in position order.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) | Formula::Bottom => vec![],
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => vec![l, r],
            Formula::Know(a) | Formula::Box(a) | Formula::Ver(a) | Formula::Evid(_, a) => vec![a],
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    pub fn contains_know(&self) -> bool {
        self.any_node(&|f| matches!(f, Formula::Know(_)))
    }

    pub fn contains_box(&self) -> bool {
        self.any_node(&|f| matches!(f, Formula::Box(_)))
    }

    pub fn contains_ver(&self) -> bool {
        self.any_node(&|f| matches!(f, Formula::Ver(_)))
    }

    pub fn contains_evid(&self) -> bool {
        self.any_node(&|f| matches!(f, Formula::Evid(..)))
    }

    pub fn any_node(&self, pred: &dyn Fn(&Formula) -> bool) -> bool {
        pred(self) || self.children().into_iter().any(|c| c.any_node(pred))
    }

    pub fn in_language(&self, lang: Language) -> bool {
        self.language_violation(lang).is_none()
    }

    /// Name of the first construct that keeps this formula out of `lang`.
    pub fn language_violation(&self, lang: Language) -> Option<&'static str> {
        let bad = |f: &Formula| -> Option<&'static str> {
            match (f, lang) {
                (Formula::Box(_), Language::Iel | Language::Explicit) => Some("[]"),
                (Formula::Ver(_), Language::Iel) => Some("V"),
                (Formula::Know(_), Language::Modal | Language::Explicit) => Some("K"),
                (Formula::Evid(..), Language::Iel | Language::Modal) => Some("t:A"),
                _ => None,
            }
        };
        fn walk(f: &Formula, bad: &dyn Fn(&Formula) -> Option<&'static str>) -> Option<&'static str> {
            bad(f).or_else(|| f.children().into_iter().find_map(|c| walk(c, bad)))
        }
        walk(self, &bad)
    }

    pub fn languages(&self) -> Vec<Language> {
        Language::ALL.into_iter().filter(|l| self.in_language(*l)).collect()
    }

    /// The subformula at `pos`, if the path exists.
    pub fn at(&self, pos: &[u8]) -> Option<&Formula> {
        let mut cur = self;
        for &i in pos {
            cur = *cur.children().get(i as usize)?;
        }
        Some(cur)
    }

    /// Rebuilds this node with new children (same arity).
    fn with_children(&self, kids: Vec<Formula>) -> Formula {
        let mut it = kids.into_iter().map(Arc::new);
        let mut next = || it.next().expect("arity");
        match self {
            Formula::Atom(_) | Formula::Bottom => self.clone(),
            Formula::And(..) => Formula::And(next(), next()),
            Formula::Or(..) => Formula::Or(next(), next()),
            Formula::Implies(..) => Formula::Implies(next(), next()),
            Formula::Know(_) => Formula::Know(next()),
            Formula::Box(_) => Formula::Box(next()),
            Formula::Ver(_) => Formula::Ver(next()),
            Formula::Evid(t, _) => Formula::Evid(t.clone(), next()),
        }
    }

    /// Simultaneous substitution of formulas for atoms.
    pub fn subst_atoms(&self, map: &dyn Fn(&str) -> Option<Formula>) -> Formula {
        self.subst_atoms_opt(map).unwrap_or_else(|| self.clone())
    }

    fn subst_atoms_opt(&self, map: &dyn Fn(&str) -> Option<Formula>) -> Option<Formula> {
        match self {
            Formula::Atom(n) => map(n),
            Formula::Bottom => None,
            _ => self.rebuild_with(|c| c.subst_atoms_opt(map)),
        }
    }

    /// Replaces proof variables by terms everywhere, including inside
    /// nested evidence bodies.
    pub fn subst_term_vars(&self, map: &dyn Fn(&str) -> Option<ProofTerm>) -> Formula {
        self.subst_term_vars_opt(map).unwrap_or_else(|| self.clone())
    }

    pub fn subst_term_vars_opt(&self, map: &dyn Fn(&str) -> Option<ProofTerm>) -> Option<Formula> {
        match self {
            Formula::Atom(_) | Formula::Bottom => None,
            Formula::Evid(t, a) => {
                let nt = t.subst_vars(map);
                let na = a.subst_term_vars_opt(map);
                if nt.is_none() && na.is_none() {
                    return None;
                }
                Some(Formula::Evid(
                    nt.map(Arc::new).unwrap_or_else(|| t.clone()),
                    na.map(Arc::new).unwrap_or_else(|| a.clone()),
                ))
            }
            _ => self.rebuild_with(|c| c.subst_term_vars_opt(map)),
        }
    }

    fn rebuild_with(&self, f: impl Fn(&Formula) -> Option<Formula>) -> Option<Formula> {
        let kids = self.children();
        let new: Vec<Option<Formula>> = kids.iter().map(|c| f(c)).collect();
        if new.iter().all(Option::is_none) {
            return None;
        }
        let merged = new
            .into_iter()
            .zip(kids)
            .map(|(n, old)| n.unwrap_or_else(|| old.clone()))
            .collect();
        Some(self.with_children(merged))
    }

    /// Every proof term occurring in the formula, outermost first.
    pub fn terms(&self) -> Vec<&ProofTerm> {
        let mut out = Vec::new();
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a ProofTerm>) {
            if let Formula::Evid(t, _) = f {
                out.push(t);
            }
            for c in f.children() {
                walk(c, out);
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn mentions_term_var(&self, pred: &dyn Fn(&str) -> bool) -> bool {
        self.terms().into_iter().any(|t| t.mentions_var(pred))
    }

    pub fn atoms(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        fn walk(f: &Formula, out: &mut BTreeSet<Arc<str>>) {
            if let Formula::Atom(n) = f {
                out.insert(n.clone());
            }
            for c in f.children() {
                walk(c, out);
            }
        }
        walk(self, &mut out);
        out
    }

    /// Replaces the subformula at `pos`.
    pub fn replace_at(&self, pos: &[u8], new: Formula) -> Option<Formula> {
        match pos.split_first() {
            None => Some(new),
            Some((&i, rest)) => {
                let kids = self.children();
                let child = kids.get(i as usize)?;
                let replaced = child.replace_at(rest, new)?;
                let merged = kids
                    .iter()
                    .enumerate()
                    .map(|(k, c)| if k == i as usize { replaced.clone() } else { (*c).clone() })
                    .collect();
                Some(self.with_children(merged))
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_terms() {
        let t = ProofTerm::app(ProofTerm::constant("c"), ProofTerm::bang(ProofTerm::constant("a")));
        assert!(t.is_ground());
        assert!(!ProofTerm::plus(t, ProofTerm::var("x")).is_ground());
    }

    #[test]
    fn language_membership() {
        let k = Formula::know(Formula::atom("p"));
        assert_eq!(k.languages(), vec![Language::Iel]);
        let v = Formula::ver(Formula::atom("p"));
        assert_eq!(v.languages(), vec![Language::Modal, Language::Explicit]);
        let p = Formula::atom("p");
        assert_eq!(p.languages().len(), 3);
        let e = Formula::evid(ProofTerm::var("x"), p);
        assert_eq!(e.language_violation(Language::Modal), Some("t:A"));
    }

    #[test]
    fn conj_and_disj_shapes() {
        let (p, q, r) = (Formula::atom("p"), Formula::atom("q"), Formula::atom("r"));
        assert_eq!(Formula::conj(&[]), Formula::top());
        assert_eq!(Formula::conj(std::slice::from_ref(&p)), p);
        assert_eq!(
            Formula::conj(&[p.clone(), q.clone(), r.clone()]),
            Formula::and(p.clone(), Formula::and(q.clone(), r.clone()))
        );
        assert_eq!(Formula::disj(&[]), Formula::Bottom);
        assert_eq!(Formula::disj(&[p.clone(), q.clone()]), Formula::or(p, q));
    }

    #[test]
    fn term_substitution_reaches_nested_evidence() {
        let x = ProofTerm::var("v1");
        let inner = Formula::evid(x.clone(), Formula::atom("p"));
        let f = Formula::evid(ProofTerm::plus(x, ProofTerm::var("y")), inner);
        let g = f.subst_term_vars(&|n| (n == "v1").then(|| ProofTerm::constant("c")));
        assert!(!g.mentions_term_var(&|n| n == "v1"));
        assert!(g.mentions_term_var(&|n| n == "y"));
    }
}
