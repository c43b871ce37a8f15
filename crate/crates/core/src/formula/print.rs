use super::{Formula, ProofTerm};

/// Printer settings. The default renders `A -> _|_` as `~A` and uses the
/// ASCII token set, which the parser reads back unchanged.
#[derive(Debug, Clone, Copy)]
pub struct PrintOptions {
    pub negation: bool,
    pub unicode: bool,
}

impl Default for PrintOptions {
    fn default() -> Self {
        PrintOptions { negation: true, unicode: false }
    }
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Prec {
    Imp,
    Or,
    And,
    Unary,
}

pub fn print(f: &Formula) -> String {
    PrintOptions::default().formula(f)
}

pub fn print_term(t: &ProofTerm) -> String {
    let mut out = String::new();
    PrintOptions::default().term(t, 0, &mut out);
    out
}

impl PrintOptions {
    pub fn formula(&self, f: &Formula) -> String {
        let mut out = String::new();
        self.write(f, Prec::Imp, &mut out);
        out
    }

    fn sym(&self, ascii: &'static str, uni: &'static str) -> &'static str {
        if self.unicode {
            uni
        } else {
            ascii
        }
    }

    fn write(&self, f: &Formula, ctx: Prec, out: &mut String) {
        let prec = match f {
            Formula::Implies(_, b) if self.negation && **b == Formula::Bottom => Prec::Unary,
            Formula::Implies(..) => Prec::Imp,
            Formula::Or(..) => Prec::Or,
            Formula::And(..) => Prec::And,
            _ => Prec::Unary,
        };
        let paren = prec < ctx;
        if paren {
            out.push('(');
        }
        match f {
            Formula::Atom(n) => out.push_str(n),
            Formula::Bottom => out.push_str(self.sym("_|_", "⊥")),
            Formula::Implies(a, b) if prec == Prec::Unary => {
                debug_assert!(**b == Formula::Bottom);
                out.push_str(self.sym("~", "¬"));
                self.write(a, Prec::Unary, out);
            }
            Formula::Implies(a, b) => {
                self.write(a, Prec::Or, out);
                out.push_str(self.sym(" -> ", " → "));
                self.write(b, Prec::Imp, out);
            }
            Formula::Or(a, b) => {
                self.write(a, Prec::Or, out);
                out.push_str(self.sym(" | ", " ∨ "));
                self.write(b, Prec::And, out);
            }
            Formula::And(a, b) => {
                self.write(a, Prec::And, out);
                out.push_str(self.sym(" & ", " ∧ "));
                self.write(b, Prec::Unary, out);
            }
            Formula::Know(a) => self.prefix("K", a, out),
            Formula::Ver(a) => self.prefix("V", a, out),
            Formula::Box(a) => {
                out.push_str(self.sym("[]", "□"));
                self.write(a, Prec::Unary, out);
            }
            Formula::Evid(t, a) => {
                let compound = matches!(**t, ProofTerm::App(..) | ProofTerm::Plus(..));
                if compound {
                    out.push('(');
                }
                self.term(t, 0, out);
                if compound {
                    out.push(')');
                }
                out.push(':');
                self.write(a, Prec::Unary, out);
            }
        }
        if paren {
            out.push(')');
        }
    }

    // `K p` keeps a space before identifier-like operands so the letter
    // operators stay readable; `V[]p` does not need one.
    fn prefix(&self, op: &str, a: &Formula, out: &mut String) {
        out.push_str(op);
        let mut body = String::new();
        self.write(a, Prec::Unary, &mut body);
        if body.starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_') {
            out.push(' ');
        }
        out.push_str(&body);
    }

    // Levels: 0 = sum, 1 = application, 2 = operand of `!`.
    fn term(&self, t: &ProofTerm, ctx: u8, out: &mut String) {
        let prec = match t {
            ProofTerm::Plus(..) => 0,
            ProofTerm::App(..) => 1,
            _ => 2,
        };
        let paren = prec < ctx;
        if paren {
            out.push('(');
        }
        match t {
            ProofTerm::Var(n) | ProofTerm::Const(n) => out.push_str(n),
            ProofTerm::Plus(l, r) => {
                self.term(l, 0, out);
                out.push_str(" + ");
                self.term(r, 1, out);
            }
            ProofTerm::App(l, r) => {
                self.term(l, 1, out);
                out.push_str(self.sym(" * ", " · "));
                self.term(r, 2, out);
            }
            ProofTerm::Bang(a) => {
                out.push('!');
                self.term(a, 2, out);
            }
        }
        if paren {
            out.push(')');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, Language};

    #[test]
    fn know_atom() {
        assert_eq!(print(&Formula::know(Formula::atom("p"))), "K p");
    }

    #[test]
    fn box_implies_ver() {
        let f = Formula::implies(Formula::boxed(Formula::atom("p")), Formula::ver(Formula::atom("p")));
        assert_eq!(print(&f), "[]p -> V p");
    }

    #[test]
    fn negation_rendering() {
        let f = Formula::not(Formula::atom("p"));
        assert_eq!(print(&f), "~p");
        let plain = PrintOptions { negation: false, unicode: false };
        assert_eq!(plain.formula(&f), "p -> _|_");
    }

    #[test]
    fn anchor_string() {
        let f = parse("[]~[]V[]_|_", Language::Modal).unwrap();
        assert_eq!(print(&f), "[]~[]V[]_|_");
    }

    #[test]
    fn minimal_parentheses() {
        for s in [
            "(p -> q) -> r",
            "p -> q -> r",
            "(p | q) & r",
            "p & q | r",
            "~(p & q)",
            "~~p",
            "(x + !y):(p & ~q)",
            "(x * y * z):p",
            "(x * (y * z)):p",
            "((x + y) * z):p",
            "!(x * y):x:p",
            "V x:p",
            "(p -> q) | r",
            "~p -> q",
        ] {
            let f = parse(s, Language::Explicit).or_else(|_| parse(s, Language::Modal)).unwrap();
            assert_eq!(print(&f), s);
        }
    }

    #[test]
    fn unicode_output_parses_back() {
        let f = parse("[](p & ~q) -> V (x + c):_|_ | r", Language::Explicit);
        assert!(f.is_err(), "box is not explicit");
        let f = parse("(p & ~q) -> V (x + c):_|_ | r", Language::Explicit).unwrap();
        let uni = PrintOptions { negation: true, unicode: true }.formula(&f);
        assert_eq!(parse(&uni, Language::Explicit).unwrap(), f);
    }
}
