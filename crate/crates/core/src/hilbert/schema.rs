use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::formula::{parse, Formula, Language, ProofTerm};

/// The Hilbert systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemId {
    IelMinus,
    Iel,
    S4vMinus,
    S4v,
    Lp,
    LpvMinus,
    Lpv,
}

impl SystemId {
    pub const ALL: [SystemId; 7] = [
        SystemId::IelMinus,
        SystemId::Iel,
        SystemId::S4vMinus,
        SystemId::S4v,
        SystemId::Lp,
        SystemId::LpvMinus,
        SystemId::Lpv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SystemId::IelMinus => "iel-minus",
            SystemId::Iel => "iel",
            SystemId::S4vMinus => "s4v-minus",
            SystemId::S4v => "s4v",
            SystemId::Lp => "lp",
            SystemId::LpvMinus => "lpv-minus",
            SystemId::Lpv => "lpv",
        }
    }

    pub fn language(self) -> Language {
        match self {
            SystemId::IelMinus | SystemId::Iel => Language::Iel,
            SystemId::S4vMinus | SystemId::S4v => Language::Modal,
            SystemId::Lp | SystemId::LpvMinus | SystemId::Lpv => Language::Explicit,
        }
    }

    pub fn is_classical(self) -> bool {
        !matches!(self, SystemId::IelMinus | SystemId::Iel)
    }

    pub fn is_explicit(self) -> bool {
        self.language() == Language::Explicit
    }

    pub fn has_box(self) -> bool {
        self.language() == Language::Modal
    }

    /// Schemas in matching order.
    pub fn schemas(self) -> &'static [Schema] {
        use Schema::*;
        const PROP: [Schema; 9] =
            [K, S, AndElimL, AndElimR, AndIntro, OrIntroL, OrIntroR, OrElim, ExFalso];
        static TABLE: OnceLock<HashMap<SystemId, Vec<Schema>>> = OnceLock::new();
        let table = TABLE.get_or_init(|| {
            let mut m = HashMap::new();
            for sys in SystemId::ALL {
                let mut v = PROP.to_vec();
                if sys.is_classical() {
                    v.push(DoubleNegation);
                }
                match sys {
                    SystemId::IelMinus => v.extend([KDistribution, CoReflection]),
                    SystemId::Iel => v.extend([KDistribution, CoReflection, Factivity, NotKBottom]),
                    SystemId::S4vMinus => v.extend([BoxK, BoxT, Box4, VK, BoxV]),
                    SystemId::S4v => v.extend([BoxK, BoxT, Box4, VK, BoxV, NotBoxVBottom]),
                    SystemId::Lp => v.extend([Application, Reflection, ProofChecker, PlusLeft, PlusRight]),
                    SystemId::LpvMinus => v.extend([
                        Application, Reflection, ProofChecker, PlusLeft, PlusRight, VK, EvidenceV,
                    ]),
                    SystemId::Lpv => v.extend([
                        Application,
                        Reflection,
                        ProofChecker,
                        PlusLeft,
                        PlusRight,
                        VK,
                        EvidenceV,
                        NotEvidenceVBottom,
                    ]),
                }
                m.insert(sys, v);
            }
            m
        });
        &table[&self]
    }

    pub fn has_schema(self, s: Schema) -> bool {
        self.schemas().contains(&s)
    }
}

impl std::str::FromStr for SystemId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase().replace(['_', '-', '⁻'], "");
        Ok(match key.as_str() {
            "ielminus" => SystemId::IelMinus,
            "iel" => SystemId::Iel,
            "s4vminus" => SystemId::S4vMinus,
            "s4v" => SystemId::S4v,
            "lp" => SystemId::Lp,
            "lpvminus" => SystemId::LpvMinus,
            "lpv" => SystemId::Lpv,
            _ => return Err(format!("unknown Hilbert system `{s}`")),
        })
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Axiom schemas. The declaration order is the matching order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schema {
    /// `A -> B -> A`
    K,
    /// `(A -> B -> C) -> (A -> B) -> A -> C`
    S,
    AndElimL,
    AndElimR,
    /// `A -> B -> A & B`
    AndIntro,
    OrIntroL,
    OrIntroR,
    /// `(A -> C) -> (B -> C) -> A | B -> C`
    OrElim,
    /// `_|_ -> A`
    ExFalso,
    /// `~~A -> A`
    DoubleNegation,
    /// `K(A -> B) -> K A -> K B`
    KDistribution,
    /// `A -> K A`
    CoReflection,
    /// `K A -> ~~A`
    Factivity,
    /// `~K _|_`
    NotKBottom,
    BoxK,
    BoxT,
    Box4,
    /// `V(A -> B) -> V A -> V B`
    VK,
    /// `[]A -> V A`
    BoxV,
    /// `~[]V _|_`
    NotBoxVBottom,
    /// `t:(A -> B) -> s:A -> (t * s):B`
    Application,
    /// `t:A -> A`
    Reflection,
    /// `t:A -> !t:t:A`
    ProofChecker,
    /// `t:A -> (s + t):A`
    PlusLeft,
    /// `t:A -> (t + s):A`
    PlusRight,
    /// `t:A -> V A`
    EvidenceV,
    /// `~t:V _|_`
    NotEvidenceVBottom,
}

impl Schema {
    pub const ALL: [Schema; 27] = {
        use Schema::*;
        [
            K, S, AndElimL, AndElimR, AndIntro, OrIntroL, OrIntroR, OrElim, ExFalso,
            DoubleNegation, KDistribution, CoReflection, Factivity, NotKBottom, BoxK, BoxT,
            Box4, VK, BoxV, NotBoxVBottom, Application, Reflection, ProofChecker, PlusLeft,
            PlusRight, EvidenceV, NotEvidenceVBottom,
        ]
    };

    pub fn name(self) -> &'static str {
        use Schema::*;
        match self {
            K => "k",
            S => "s",
            AndElimL => "and-elim-l",
            AndElimR => "and-elim-r",
            AndIntro => "and-intro",
            OrIntroL => "or-intro-l",
            OrIntroR => "or-intro-r",
            OrElim => "or-elim",
            ExFalso => "ex-falso",
            DoubleNegation => "double-negation",
            KDistribution => "k-distribution",
            CoReflection => "co-reflection",
            Factivity => "factivity",
            NotKBottom => "not-k-bottom",
            BoxK => "box-k",
            BoxT => "box-t",
            Box4 => "box-4",
            VK => "v-k",
            BoxV => "box-v",
            NotBoxVBottom => "not-box-v-bottom",
            Application => "application",
            Reflection => "reflection",
            ProofChecker => "proof-checker",
            PlusLeft => "plus-left",
            PlusRight => "plus-right",
            EvidenceV => "evidence-v",
            NotEvidenceVBottom => "not-evidence-v-bottom",
        }
    }

    /// The conventional axiom label of this schema inside `system`, e.g.
    /// `E6` for [`Schema::EvidenceV`] in LPV.
    pub fn label(self, system: SystemId) -> &'static str {
        use Schema::*;
        let explicit = system.is_explicit();
        let modal = system.has_box();
        match self {
            K | S | AndElimL | AndElimR | AndIntro | OrIntroL | OrIntroR | OrElim | ExFalso
            | DoubleNegation => {
                if explicit {
                    "E0"
                } else if modal {
                    "A0"
                } else {
                    "IE0"
                }
            }
            KDistribution => "IE1",
            CoReflection => "IE2",
            Factivity => "IE3",
            NotKBottom => "IE3'",
            BoxK | BoxT | Box4 => "A0",
            VK if explicit => "E5",
            VK => "A1",
            BoxV => "A2",
            NotBoxVBottom => "A3",
            Application => "E1",
            Reflection => "E2",
            ProofChecker => "E3",
            PlusLeft | PlusRight => "E4",
            EvidenceV => "E6",
            NotEvidenceVBottom => "E7",
        }
    }

    fn source(self) -> (&'static str, Language) {
        use Language::*;
        use Schema::*;
        match self {
            K => ("a -> b -> a", Iel),
            S => ("(a -> b -> c) -> (a -> b) -> a -> c", Iel),
            AndElimL => ("a & b -> a", Iel),
            AndElimR => ("a & b -> b", Iel),
            AndIntro => ("a -> b -> a & b", Iel),
            OrIntroL => ("a -> a | b", Iel),
            OrIntroR => ("b -> a | b", Iel),
            OrElim => ("(a -> c) -> (b -> c) -> a | b -> c", Iel),
            ExFalso => ("_|_ -> a", Iel),
            DoubleNegation => ("~~a -> a", Iel),
            KDistribution => ("K(a -> b) -> K a -> K b", Iel),
            CoReflection => ("a -> K a", Iel),
            Factivity => ("K a -> ~~a", Iel),
            NotKBottom => ("~K _|_", Iel),
            BoxK => ("[](a -> b) -> []a -> []b", Modal),
            BoxT => ("[]a -> a", Modal),
            Box4 => ("[]a -> [][]a", Modal),
            VK => ("V(a -> b) -> V a -> V b", Modal),
            BoxV => ("[]a -> V a", Modal),
            NotBoxVBottom => ("~[]V _|_", Modal),
            Application => ("t:(a -> b) -> s:a -> (t * s):b", Explicit),
            Reflection => ("t:a -> a", Explicit),
            ProofChecker => ("t:a -> !t:t:a", Explicit),
            PlusLeft => ("t:a -> (s + t):a", Explicit),
            PlusRight => ("t:a -> (t + s):a", Explicit),
            EvidenceV => ("t:a -> V a", Explicit),
            NotEvidenceVBottom => ("~t:V _|_", Explicit),
        }
    }

    /// The schema as a formula over metavariables `?A ?B ?C` (formulas)
    /// and `?t ?s` (terms).
    pub fn pattern(self) -> &'static Formula {
        static PATTERNS: OnceLock<HashMap<Schema, Formula>> = OnceLock::new();
        let table = PATTERNS.get_or_init(|| {
            Schema::ALL
                .into_iter()
                .map(|s| {
                    let (src, lang) = s.source();
                    let f = parse(src, lang).expect("schema source parses");
                    let f = f.subst_atoms(&|n| Some(Formula::atom(&format!("?{}", n.to_uppercase()))));
                    let f = f.subst_term_vars(&|n| Some(ProofTerm::var(&format!("?{n}"))));
                    (s, f)
                })
                .collect()
        });
        &table[&self]
    }

    /// Matches `f` against this schema and returns the metavariable
    /// bindings.
    pub fn matches(self, f: &Formula) -> Option<Bindings> {
        let mut b = Bindings::default();
        match_formula(self.pattern(), f, &mut b).then_some(b)
    }

    /// Instantiates the schema. Panics when a metavariable the schema uses
    /// is left unbound.
    pub fn instantiate(self, b: &Bindings) -> Formula {
        let unbound = |n: &str| -> ! { panic!("unbound {n} in {}", self.name()) };
        // Terms first: the formulas plugged in below may mention proof
        // variables of their own.
        let f = self.pattern().subst_term_vars(&|n| {
            n.starts_with('?').then(|| b.terms.get(n).cloned().unwrap_or_else(|| unbound(n)))
        });
        f.subst_atoms(&|n| {
            n.starts_with('?').then(|| b.formulas.get(n).cloned().unwrap_or_else(|| unbound(n)))
        })
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Schema {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Schema::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown schema `{s}`"))
    }
}

/// Metavariable assignment produced by schema matching.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bindings {
    pub formulas: HashMap<Arc<str>, Formula>,
    pub terms: HashMap<Arc<str>, ProofTerm>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn a(mut self, f: Formula) -> Self {
        self.formulas.insert("?A".into(), f);
        self
    }

    pub fn b(mut self, f: Formula) -> Self {
        self.formulas.insert("?B".into(), f);
        self
    }

    pub fn c(mut self, f: Formula) -> Self {
        self.formulas.insert("?C".into(), f);
        self
    }

    pub fn t(mut self, t: ProofTerm) -> Self {
        self.terms.insert("?t".into(), t);
        self
    }

    pub fn s(mut self, t: ProofTerm) -> Self {
        self.terms.insert("?s".into(), t);
        self
    }
}

fn match_formula(p: &Formula, f: &Formula, b: &mut Bindings) -> bool {
    match (p, f) {
        (Formula::Atom(n), _) if n.starts_with('?') => match b.formulas.get(n) {
            Some(bound) => bound == f,
            None => {
                b.formulas.insert(n.clone(), f.clone());
                true
            }
        },
        (Formula::Atom(x), Formula::Atom(y)) => x == y,
        (Formula::Bottom, Formula::Bottom) => true,
        (Formula::And(a, c), Formula::And(x, y))
        | (Formula::Or(a, c), Formula::Or(x, y))
        | (Formula::Implies(a, c), Formula::Implies(x, y)) => {
            match_formula(a, x, b) && match_formula(c, y, b)
        }
        (Formula::Know(a), Formula::Know(x))
        | (Formula::Box(a), Formula::Box(x))
        | (Formula::Ver(a), Formula::Ver(x)) => match_formula(a, x, b),
        (Formula::Evid(s, a), Formula::Evid(t, x)) => match_term(s, t, b) && match_formula(a, x, b),
        _ => false,
    }
}

fn match_term(p: &ProofTerm, t: &ProofTerm, b: &mut Bindings) -> bool {
    match (p, t) {
        (ProofTerm::Var(n), _) if n.starts_with('?') => match b.terms.get(n) {
            Some(bound) => bound == t,
            None => {
                b.terms.insert(n.clone(), t.clone());
                true
            }
        },
        (ProofTerm::App(a, c), ProofTerm::App(x, y)) | (ProofTerm::Plus(a, c), ProofTerm::Plus(x, y)) => {
            match_term(a, x, b) && match_term(c, y, b)
        }
        (ProofTerm::Bang(a), ProofTerm::Bang(x)) => match_term(a, x, b),
        _ => p == t,
    }
}

/// First schema of `system` that `f` instantiates.
pub fn match_axiom(f: &Formula, system: SystemId) -> Option<Schema> {
    system.schemas().iter().copied().find(|s| s.matches(f).is_some())
}

/// Every schema of `system` that `f` instantiates, in matching order.
pub fn all_matches(f: &Formula, system: SystemId) -> Vec<Schema> {
    system.schemas().iter().copied().filter(|s| s.matches(f).is_some()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(src: &str, lang: Language, sys: SystemId) -> Option<Schema> {
        match_axiom(&parse(src, lang).unwrap(), sys)
    }

    #[test]
    fn v_distribution_in_s4v_minus() {
        let s = check("V(p -> q) -> V p -> V q", Language::Modal, SystemId::S4vMinus);
        assert_eq!(s, Some(Schema::VK));
        assert_eq!(s.unwrap().label(SystemId::S4vMinus), "A1");
    }

    #[test]
    fn evidence_v_in_lpv_minus() {
        let s = check("x:p -> V p", Language::Explicit, SystemId::LpvMinus);
        assert_eq!(s, Some(Schema::EvidenceV));
        assert_eq!(s.unwrap().label(SystemId::LpvMinus), "E6");
    }

    #[test]
    fn no_v_reflection() {
        assert_eq!(check("V p -> p", Language::Modal, SystemId::S4v), None);
    }

    #[test]
    fn system_specific_schemas() {
        assert_eq!(check("~[]V _|_", Language::Modal, SystemId::S4vMinus), None);
        assert_eq!(check("~[]V _|_", Language::Modal, SystemId::S4v), Some(Schema::NotBoxVBottom));
        assert_eq!(check("~~p -> p", Language::Iel, SystemId::Iel), None);
        assert_eq!(check("K p -> ~~p", Language::Iel, SystemId::IelMinus), None);
        assert_eq!(check("~K _|_", Language::Iel, SystemId::Iel), Some(Schema::NotKBottom));
    }

    #[test]
    fn repeated_metavariables_must_agree() {
        assert_eq!(check("p -> q -> q", Language::Iel, SystemId::Iel), None);
        assert_eq!(check("x:(p -> q) -> y:p -> (y * x):q", Language::Explicit, SystemId::Lp), None);
        assert_eq!(
            check("x:(p -> q) -> y:p -> (x * y):q", Language::Explicit, SystemId::Lp),
            Some(Schema::Application)
        );
    }

    #[test]
    fn all_matches_lists_overlaps() {
        // `p -> p | p` is both or-introductions.
        let f = parse("p -> p | p", Language::Iel).unwrap();
        assert_eq!(all_matches(&f, SystemId::Iel), vec![Schema::OrIntroL, Schema::OrIntroR]);
    }

    #[test]
    fn instantiate_round_trip() {
        for s in Schema::ALL {
            let b = Bindings::new()
                .a(Formula::atom("p"))
                .b(Formula::atom("q"))
                .c(Formula::atom("r"))
                .t(ProofTerm::var("x"))
                .s(ProofTerm::constant("c"));
            assert!(s.matches(&s.instantiate(&b)).is_some(), "{s}");
        }
    }
}
