//! Hilbert proofs of classical tautologies.
//!
//! Subformulas headed by `K`, `[]`, `V` or `t:A` count as atoms. The search
//! is a refutation in natural-deduction style: branches open real
//! hypothesis lines, which the deduction transform discharges when the
//! branch closes. Each fact is expanded at most once per branch.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use super::builder::Builder;
use super::deduction::discharge_in;
use super::schema::{Bindings, Schema};
use crate::formula::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not a propositional tautology: open branch with {0}")]
pub struct NotTautology(pub String);

impl Builder {
    /// Derives `goal` from the lines `premises` by propositional reasoning.
    pub fn tautology(&mut self, premises: &[usize], goal: &Formula) -> Result<usize, NotTautology> {
        if let Some(i) = self.find(goal) {
            return Ok(i);
        }
        assert!(self.system().is_classical(), "tautology prover needs a classical system");
        let mut ctx = Facts::default();
        for &p in premises {
            ctx.add(self.formula(p).clone(), p);
        }
        prove_goal(self, ctx, goal)
    }

    /// A hypothesis-free proof of the tautology `f`.
    pub fn prove_tautology(&mut self, f: &Formula) -> Result<usize, NotTautology> {
        self.tautology(&[], f)
    }
}

#[derive(Clone, Default)]
struct Facts {
    order: Vec<Formula>,
    lines: HashMap<Formula, usize>,
    done: HashSet<Formula>,
}

impl Facts {
    fn add(&mut self, f: Formula, line: usize) {
        if !self.lines.contains_key(&f) {
            self.lines.insert(f.clone(), line);
            self.order.push(f);
        }
    }

    fn get(&self, f: &Formula) -> Option<usize> {
        self.lines.get(f).copied()
    }

    fn describe(&self) -> String {
        self.order.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", ")
    }
}

fn not(f: &Formula) -> Formula {
    Formula::not(f.clone())
}

fn discharge(b: &mut Builder, target: usize, hyp: usize) -> usize {
    discharge_in(b, target, hyp).expect("no necessitation under hypotheses")
}

fn dne(b: &mut Builder, nn: usize, a: &Formula) -> usize {
    let ax = b.axiom(Schema::DoubleNegation, &Bindings::new().a(a.clone()));
    b.mp(nn, ax)
}

/// Runs a branch with the extra fact `x`; returns a line for `~x`.
fn branch(b: &mut Builder, ctx: &Facts, used: &Formula, x: &Formula) -> Result<usize, NotTautology> {
    let h = b.hyp(x.clone());
    let mut c = ctx.clone();
    c.done.insert(used.clone());
    c.add(x.clone(), h);
    let r = refute(b, c)?;
    Ok(discharge(b, r, h))
}

fn prove_goal(b: &mut Builder, mut ctx: Facts, goal: &Formula) -> Result<usize, NotTautology> {
    if let Some(l) = ctx.get(goal) {
        return Ok(l);
    }
    match goal {
        Formula::Implies(a, c) => {
            let h = b.hyp((**a).clone());
            let mut inner = ctx.clone();
            inner.add((**a).clone(), h);
            let r = prove_goal(b, inner, c)?;
            Ok(discharge(b, r, h))
        }
        Formula::And(x, y) => {
            let lx = prove_goal(b, ctx.clone(), x)?;
            let ly = prove_goal(b, ctx, y)?;
            let ax = b.axiom(Schema::AndIntro, &Bindings::new().a((**x).clone()).b((**y).clone()));
            let m = b.mp(lx, ax);
            Ok(b.mp(ly, m))
        }
        Formula::Bottom => refute(b, ctx),
        _ => {
            if let Some(bot) = saturate(b, &mut ctx) {
                return Ok(exfalso(b, bot, goal));
            }
            if let Some(l) = ctx.get(goal) {
                return Ok(l);
            }
            if let Formula::Or(x, y) = goal {
                for (side, schema) in [(x, Schema::OrIntroL), (y, Schema::OrIntroR)] {
                    if let Some(l) = ctx.get(side) {
                        let ax = b.axiom(schema, &Bindings::new().a((**x).clone()).b((**y).clone()));
                        return Ok(b.mp(l, ax));
                    }
                }
            }
            let n = not(goal);
            let h = b.hyp(n.clone());
            ctx.add(n, h);
            let r = refute(b, ctx)?;
            let nn = discharge(b, r, h);
            Ok(dne(b, nn, goal))
        }
    }
}

fn exfalso(b: &mut Builder, bot: usize, x: &Formula) -> usize {
    if *x == Formula::Bottom {
        return bot;
    }
    let ax = b.axiom(Schema::ExFalso, &Bindings::new().a(x.clone()));
    b.mp(bot, ax)
}

/// Applies the non-branching rules until nothing changes. Returns a line
/// for `_|_` if the facts become contradictory.
fn saturate(b: &mut Builder, ctx: &mut Facts) -> Option<usize> {
    let mut i = 0;
    loop {
        if let Some(l) = ctx.get(&Formula::Bottom) {
            return Some(l);
        }
        if i >= ctx.order.len() {
            return None;
        }
        let f = ctx.order[i].clone();
        i += 1;
        if ctx.done.contains(&f) {
            continue;
        }
        let line = ctx.get(&f).unwrap();
        match &f {
            Formula::And(x, y) => {
                let bind = Bindings::new().a((**x).clone()).b((**y).clone());
                let l = b.axiom(Schema::AndElimL, &bind);
                let r = b.axiom(Schema::AndElimR, &bind);
                let (lx, ly) = (b.mp(line, l), b.mp(line, r));
                ctx.add((**x).clone(), lx);
                ctx.add((**y).clone(), ly);
            }
            Formula::Implies(x, y) => {
                if let Some(lx) = ctx.get(x) {
                    let l = b.mp(lx, line);
                    ctx.add((**y).clone(), l);
                } else if **y == Formula::Bottom {
                    if !negation_alpha(b, ctx, x, line) {
                        continue;
                    }
                } else if ctx.get(y).is_none() {
                    continue;
                }
            }
            _ => continue,
        }
        ctx.done.insert(f);
        // new facts may fire earlier implications
        i = 0;
    }
}

/// Expands `~x` when that needs no branching. Returns false when `x` is
/// not of such a shape.
fn negation_alpha(b: &mut Builder, ctx: &mut Facts, x: &Formula, neg: usize) -> bool {
    match x {
        // ~~y gives y
        Formula::Implies(y, z) if **z == Formula::Bottom => {
            let l = dne(b, neg, y);
            ctx.add((**y).clone(), l);
        }
        // ~(y | z) gives ~y and ~z
        Formula::Or(y, z) => {
            for (part, schema) in [(y, Schema::OrIntroL), (z, Schema::OrIntroR)] {
                let h = b.hyp((**part).clone());
                let ax = b.axiom(schema, &Bindings::new().a((**y).clone()).b((**z).clone()));
                let or = b.mp(h, ax);
                let bot = b.mp(or, neg);
                let l = discharge(b, bot, h);
                ctx.add(not(part), l);
            }
        }
        // ~(y -> z) gives y and ~z
        Formula::Implies(y, z) => {
            let hn = b.hyp(not(y));
            let hy = b.hyp((**y).clone());
            let bot = b.mp(hy, hn);
            let zl = exfalso(b, bot, z);
            let imp = discharge(b, zl, hy);
            let bot = b.mp(imp, neg);
            let nn = discharge(b, bot, hn);
            let ly = dne(b, nn, y);
            ctx.add((**y).clone(), ly);

            let hz = b.hyp((**z).clone());
            let k = b.axiom(Schema::K, &Bindings::new().a((**z).clone()).b((**y).clone()));
            let imp = b.mp(hz, k);
            let bot = b.mp(imp, neg);
            let lz = discharge(b, bot, hz);
            ctx.add(not(z), lz);
        }
        _ => return false,
    }
    true
}

enum Beta {
    Or(Formula, Formula),
    Imp(Formula, Formula),
    NotAnd(Formula, Formula),
}

fn refute(b: &mut Builder, mut ctx: Facts) -> Result<usize, NotTautology> {
    if let Some(bot) = saturate(b, &mut ctx) {
        return Ok(bot);
    }
    let known = |ctx: &Facts, f: &Formula| ctx.get(f).is_some();
    let mut choice: Option<(Formula, Beta)> = None;
    for f in &ctx.order {
        if ctx.done.contains(f) {
            continue;
        }
        let (beta, closes) = match f {
            Formula::Or(x, y) => (
                Beta::Or((**x).clone(), (**y).clone()),
                known(&ctx, &not(x)) || known(&ctx, &not(y)),
            ),
            Formula::Implies(x, y) if **y != Formula::Bottom => {
                (Beta::Imp((**x).clone(), (**y).clone()), known(&ctx, &not(y)))
            }
            Formula::Implies(x, bot) if **bot == Formula::Bottom => match &**x {
                Formula::And(y, z) => (Beta::NotAnd((**y).clone(), (**z).clone()), known(&ctx, y) || known(&ctx, z)),
                _ => continue,
            },
            _ => continue,
        };
        if closes || choice.is_none() {
            choice = Some((f.clone(), beta));
            if closes {
                break;
            }
        }
    }
    let Some((f, beta)) = choice else {
        return Err(NotTautology(ctx.describe()));
    };
    let line = ctx.get(&f).unwrap();
    match beta {
        Beta::Or(x, y) => {
            let nx = branch(b, &ctx, &f, &x)?;
            let ny = branch(b, &ctx, &f, &y)?;
            let ax = b.axiom(Schema::OrElim, &Bindings::new().a(x).b(y).c(Formula::Bottom));
            let m = b.mp(nx, ax);
            let m = b.mp(ny, m);
            Ok(b.mp(line, m))
        }
        Beta::Imp(x, y) => {
            let ny = branch(b, &ctx, &f, &y)?;
            let nnx = branch(b, &ctx, &f, &not(&x))?;
            let lx = dne(b, nnx, &x);
            let ly = b.mp(lx, line);
            Ok(b.mp(ly, ny))
        }
        Beta::NotAnd(x, y) => {
            let nnx = branch(b, &ctx, &f, &not(&x))?;
            let nny = branch(b, &ctx, &f, &not(&y))?;
            let lx = dne(b, nnx, &x);
            let ly = dne(b, nny, &y);
            let ax = b.axiom(Schema::AndIntro, &Bindings::new().a(x).b(y));
            let m = b.mp(lx, ax);
            let xy = b.mp(ly, m);
            Ok(b.mp(xy, line))
        }
    }
}
