use std::fmt;

use serde::{Deserialize, Serialize};

use super::Formula;

/// Path of child indices from the root of a formula. Binary connectives
/// number their operands 0 and 1; unary operators and `t:A` have the single
/// child 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Position(pub Vec<u8>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn child(&self, i: u8) -> Self {
        let mut p = self.0.clone();
        p.push(i);
        Position(p)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("/")?;
        let parts: Vec<String> = self.0.iter().map(u8::to_string).collect();
        f.write_str(&parts.join("/"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Self {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

/// Polarity of the node at `pos`, the root being positive. Only the left
/// side of an implication flips (and so does `~A`, which is `A -> _|_`).
/// Returns `None` for a position that does not exist in `f`.
pub fn polarity_of(f: &Formula, pos: &Position) -> Option<Polarity> {
    polarity_from(f, &pos.0, Polarity::Positive)
}

pub(crate) fn polarity_from(f: &Formula, path: &[u8], start: Polarity) -> Option<Polarity> {
    let mut cur = f;
    let mut pol = start;
    for &i in path {
        if matches!(cur, Formula::Implies(..)) && i == 0 {
            pol = pol.flip();
        }
        cur = *cur.children().get(i as usize)?;
    }
    Some(pol)
}

/// Positions of all `[]` nodes of `f`, in pre-order.
pub fn box_positions(f: &Formula) -> Vec<Position> {
    let mut out = Vec::new();
    fn walk(f: &Formula, path: &mut Vec<u8>, out: &mut Vec<Position>) {
        if matches!(f, Formula::Box(_)) {
            out.push(Position(path.clone()));
        }
        for (i, c) in f.children().into_iter().enumerate() {
            path.push(i as u8);
            walk(c, path, out);
            path.pop();
        }
    }
    walk(f, &mut Vec::new(), &mut out);
    out
}
