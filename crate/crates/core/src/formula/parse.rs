//! Recursive-descent parser for the concrete formula grammar.
//!
//! Precedence, tightest first: prefix operators (`~`, `K`, `V`, `[]`) and
//! `t:A`; then `&`; then `|`; then `->` (right associative). `&` and `|`
//! associate to the left. Terms: `!` binds tightest, then `*`, then `+`.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{Formula, Language, ProofTerm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("`{construct}` is not part of the {language} language")]
    Language { language: Language, construct: &'static str },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Bot,
    And,
    Or,
    Imp,
    Not,
    Know,
    Ver,
    Box,
    Colon,
    Star,
    Plus,
    Bang,
    LParen,
    RParen,
    Comma,
    Arrow,
}

fn describe(t: Option<&Tok>) -> String {
    match t {
        None => "end of input".into(),
        Some(Tok::Ident(s)) => format!("`{s}`"),
        Some(t) => format!("{t:?}"),
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    let rest = |i: usize| &text[i..];
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let (tok, len) = if rest(i).starts_with("_|_") {
            (Tok::Bot, 3)
        } else if rest(i).starts_with("->") {
            (Tok::Imp, 2)
        } else if rest(i).starts_with("=>") {
            (Tok::Arrow, 2)
        } else if rest(i).starts_with("[]") {
            (Tok::Box, 2)
        } else if c.is_ascii_lowercase() {
            let end = rest(i)
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                .map_or(text.len(), |k| i + k);
            (Tok::Ident(text[i..end].to_string()), end - i)
        } else {
            let t = match c {
                '⊥' => Tok::Bot,
                '&' | '∧' => Tok::And,
                '|' | '∨' => Tok::Or,
                '→' => Tok::Imp,
                '~' | '¬' => Tok::Not,
                'K' => Tok::Know,
                'V' => Tok::Ver,
                '□' => Tok::Box,
                ':' => Tok::Colon,
                '*' | '·' => Tok::Star,
                '+' => Tok::Plus,
                '!' => Tok::Bang,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '⇒' => Tok::Arrow,
                other => {
                    return Err(ParseError::Syntax {
                        pos: i,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            };
            (t, c.len_utf8())
        };
        out.push((i, tok));
        let target = i + len;
        while chars.peek().is_some_and(|&(k, _)| k < target) {
            chars.next();
        }
    }
    Ok(out)
}

/// Parser with optional declarations overriding the default naming rule
/// for proof terms (names starting with `a`, `b` or `c` are constants,
/// everything else is a variable).
#[derive(Debug, Clone, Default)]
pub struct Parser {
    constants: BTreeSet<String>,
    variables: BTreeSet<String>,
}

impl Parser {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare_constant(mut self, name: &str) -> Self {
        self.variables.remove(name);
        self.constants.insert(name.to_string());
        self
    }

    pub fn declare_variable(mut self, name: &str) -> Self {
        self.constants.remove(name);
        self.variables.insert(name.to_string());
        self
    }

    fn term_name(&self, name: &str) -> ProofTerm {
        if self.constants.contains(name) {
            ProofTerm::constant(name)
        } else if self.variables.contains(name) {
            ProofTerm::var(name)
        } else if name.starts_with(['a', 'b', 'c']) {
            ProofTerm::constant(name)
        } else {
            ProofTerm::var(name)
        }
    }

    pub fn formula(&self, text: &str, language: Language) -> Result<Formula, ParseError> {
        let mut st = State::new(self, text)?;
        let f = st.formula()?;
        st.expect_end()?;
        check_language(&f, language)?;
        Ok(f)
    }

    /// Parses `A1, ..., An => B1, ..., Bm`; either side may be empty.
    pub fn sequent(
        &self,
        text: &str,
        language: Language,
    ) -> Result<(Vec<Formula>, Vec<Formula>), ParseError> {
        let mut st = State::new(self, text)?;
        let ant = st.formula_list(Some(&Tok::Arrow))?;
        st.expect(&Tok::Arrow)?;
        let suc = st.formula_list(None)?;
        st.expect_end()?;
        for f in ant.iter().chain(&suc) {
            check_language(f, language)?;
        }
        Ok((ant, suc))
    }

    pub fn term(&self, text: &str) -> Result<ProofTerm, ParseError> {
        let mut st = State::new(self, text)?;
        let t = st.term()?;
        st.expect_end()?;
        Ok(t)
    }
}

fn check_language(f: &Formula, language: Language) -> Result<(), ParseError> {
    match f.language_violation(language) {
        Some(construct) => Err(ParseError::Language { language, construct }),
        None => Ok(()),
    }
}

/// Parses a formula of `language` with the default naming rule.
pub fn parse(text: &str, language: Language) -> Result<Formula, ParseError> {
    Parser::new().formula(text, language)
}

pub fn parse_sequent_sides(
    text: &str,
    language: Language,
) -> Result<(Vec<Formula>, Vec<Formula>), ParseError> {
    Parser::new().sequent(text, language)
}

pub fn parse_term(text: &str) -> Result<ProofTerm, ParseError> {
    Parser::new().term(text)
}

struct State<'a> {
    parser: &'a Parser,
    toks: Vec<(usize, Tok)>,
    at: usize,
    len: usize,
}

impl<'a> State<'a> {
    fn new(parser: &'a Parser, text: &str) -> Result<Self, ParseError> {
        Ok(State { parser, toks: tokenize(text)?, at: 0, len: text.len() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.len, |(p, _)| *p)
    }

    fn err<T>(&self, message: String) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.pos(), message })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            self.err(format!("expected {t:?}, found {}", describe(self.peek())))
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => self.err(format!("unexpected {}", describe(Some(t)))),
        }
    }

    fn formula_list(&mut self, stop: Option<&Tok>) -> Result<Vec<Formula>, ParseError> {
        let mut out = Vec::new();
        if self.peek() == stop {
            return Ok(out);
        }
        out.push(self.formula()?);
        while self.eat(&Tok::Comma) {
            out.push(self.formula()?);
        }
        Ok(out)
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Imp) {
            let rhs = self.formula()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        while self.eat(&Tok::Or) {
            acc = Formula::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while self.eat(&Tok::And) {
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.at += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Know) => {
                self.at += 1;
                Ok(Formula::know(self.unary()?))
            }
            Some(Tok::Ver) => {
                self.at += 1;
                Ok(Formula::ver(self.unary()?))
            }
            Some(Tok::Box) => {
                self.at += 1;
                Ok(Formula::boxed(self.unary()?))
            }
            _ => {
                // `t:A` needs lookahead past an arbitrary term.
                let save = self.at;
                if let Ok(t) = self.term() {
                    if self.eat(&Tok::Colon) {
                        return Ok(Formula::evid(t, self.unary()?));
                    }
                }
                self.at = save;
                self.primary()
            }
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.at += 1;
                Ok(Formula::atom(&name))
            }
            Some(Tok::Bot) => {
                self.at += 1;
                Ok(Formula::Bottom)
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let f = self.formula()?;
                self.expect(&Tok::RParen)?;
                Ok(f)
            }
            other => self.err(format!("expected a formula, found {}", describe(other.as_ref()))),
        }
    }

    fn term(&mut self) -> Result<ProofTerm, ParseError> {
        let mut acc = self.term_app()?;
        while self.eat(&Tok::Plus) {
            acc = ProofTerm::plus(acc, self.term_app()?);
        }
        Ok(acc)
    }

    fn term_app(&mut self) -> Result<ProofTerm, ParseError> {
        let mut acc = self.term_unary()?;
        while self.eat(&Tok::Star) {
            acc = ProofTerm::app(acc, self.term_unary()?);
        }
        Ok(acc)
    }

    fn term_unary(&mut self) -> Result<ProofTerm, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Bang) => {
                self.at += 1;
                Ok(ProofTerm::bang(self.term_unary()?))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                Ok(self.parser.term_name(&name))
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let t = self.term()?;
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            other => self.err(format!("expected a proof term, found {}", describe(other.as_ref()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }
    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn know_of_implication() {
        let f = parse("K (p -> q)", Language::Iel).unwrap();
        assert_eq!(f, Formula::know(Formula::implies(p(), q())));
    }

    #[test]
    fn evidence_with_compound_term() {
        let f = parse("(x + !y):(p & ~q)", Language::Explicit).unwrap();
        let t = ProofTerm::plus(ProofTerm::var("x"), ProofTerm::bang(ProofTerm::var("y")));
        assert_eq!(f, Formula::evid(t, Formula::and(p(), Formula::not(q()))));
    }

    #[test]
    fn box_rejected_in_iel() {
        let err = parse("[]p -> V p", Language::Iel).unwrap_err();
        assert!(matches!(err, ParseError::Language { language: Language::Iel, .. }));
    }

    #[test]
    fn know_rejected_in_explicit() {
        assert!(parse("K p", Language::Explicit).is_err());
    }

    #[test]
    fn evidence_binds_tighter_than_implication() {
        let f = parse("t:p -> p", Language::Explicit).unwrap();
        assert_eq!(f, Formula::implies(Formula::evid(ProofTerm::var("t"), p()), p()));
    }

    #[test]
    fn implication_is_right_associative() {
        let f = parse("p -> q -> p", Language::Modal).unwrap();
        assert_eq!(f, Formula::implies(p(), Formula::implies(q(), p())));
    }

    #[test]
    fn conjunction_over_disjunction() {
        let f = parse("p | q & p", Language::Modal).unwrap();
        assert_eq!(f, Formula::or(p(), Formula::and(q(), p())));
    }

    #[test]
    fn unicode_aliases() {
        let a = parse("□(p ∧ ¬q) → V ⊥", Language::Modal).unwrap();
        let b = parse("[](p & ~q) -> V _|_", Language::Modal).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn glued_prefix_operators() {
        let f = parse("~[]V_|_", Language::Modal).unwrap();
        assert_eq!(f, Formula::not(Formula::boxed(Formula::ver(Formula::Bottom))));
        assert_eq!(parse("Kp -> p", Language::Iel).unwrap(), Formula::implies(Formula::know(p()), p()));
    }

    #[test]
    fn constant_naming_rule_and_declarations() {
        let f = parse("c1:p", Language::Explicit).unwrap();
        assert_eq!(f, Formula::evid(ProofTerm::constant("c1"), p()));
        let g = Parser::new().declare_variable("c1").formula("c1:p", Language::Explicit).unwrap();
        assert_eq!(g, Formula::evid(ProofTerm::var("c1"), p()));
        let h = Parser::new().declare_constant("k").formula("k * x:p", Language::Explicit).unwrap();
        let t = ProofTerm::app(ProofTerm::constant("k"), ProofTerm::var("x"));
        assert_eq!(h, Formula::evid(t, p()));
    }

    #[test]
    fn syntax_error_has_position() {
        match parse("p & -> q", Language::Modal) {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse("p q", Language::Modal).is_err());
        assert!(parse("(p", Language::Modal).is_err());
        assert!(parse("", Language::Modal).is_err());
    }

    #[test]
    fn sequents() {
        let (a, s) = parse_sequent_sides("[]p, [](p -> q) => V q", Language::Modal).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(s, vec![Formula::ver(q())]);
        let (a, s) = parse_sequent_sides("=> ~[]V_|_", Language::Modal).unwrap();
        assert!(a.is_empty());
        assert_eq!(s.len(), 1);
        let (a, s) = parse_sequent_sides("_|_ =>", Language::Modal).unwrap();
        assert_eq!(a, vec![Formula::Bottom]);
        assert!(s.is_empty());
    }
}
