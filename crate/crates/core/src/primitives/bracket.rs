//! Symbolic bracket expressions over the fields `f_i`, `g_i`, `h_i`.
//!
//! Text form uses one-based indices, e.g. `[h1+h2-f4,g3]`.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::allocation::GroupAllocation;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FieldKind {
    /// Raw group field `f_i`.
    F,
    /// Compiled translation field `g_i`.
    G,
    /// Compiled rotation field `h_i`.
    H,
}

/// A generator; `group` is zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldRef {
    pub kind: FieldKind,
    pub group: usize,
}

impl FieldRef {
    pub fn f(group: usize) -> Self {
        FieldRef { kind: FieldKind::F, group }
    }
    pub fn g(group: usize) -> Self {
        FieldRef { kind: FieldKind::G, group }
    }
    pub fn h(group: usize) -> Self {
        FieldRef { kind: FieldKind::H, group }
    }

    fn validate(&self, alloc: &GroupAllocation) -> Result<()> {
        let m = alloc.groups();
        let ok = match self.kind {
            FieldKind::F => self.group < m,
            FieldKind::G | FieldKind::H => self.group + 1 < m,
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(alloc::format!("{self} is not defined for {m} groups")))
        }
    }

    /// True for generators that only rotate: `h_i` and `f_m`.
    fn is_rotation(&self, alloc: &GroupAllocation) -> bool {
        match self.kind {
            FieldKind::H => true,
            FieldKind::F => self.group == alloc.rotate_group(),
            FieldKind::G => false,
        }
    }

    /// Whether this rotation generator turns `robot`.
    fn turns(&self, alloc: &GroupAllocation, robot: usize) -> bool {
        match self.kind {
            FieldKind::H => !alloc.contains(self.group, robot),
            _ => true,
        }
    }
}

impl fmt::Display for FieldRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            FieldKind::F => 'f',
            FieldKind::G => 'g',
            FieldKind::H => 'h',
        };
        write!(f, "{k}{}", self.group + 1)
    }
}

/// Integer combination of generators, kept sorted with nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Combo {
    terms: Vec<(i64, FieldRef)>,
}

impl Combo {
    pub fn new(terms: impl IntoIterator<Item = (i64, FieldRef)>) -> Self {
        let mut merged: Vec<(i64, FieldRef)> = Vec::new();
        for (c, f) in terms {
            match merged.iter_mut().find(|(_, g)| *g == f) {
                Some(slot) => slot.0 += c,
                None => merged.push((c, f)),
            }
        }
        merged.retain(|(c, _)| *c != 0);
        // positive terms first; h's, then f's, then g's; ascending group
        merged.sort_by_key(|(c, f)| {
            let rank = match f.kind {
                FieldKind::H => 0,
                FieldKind::F => 1,
                FieldKind::G => 2,
            };
            (*c < 0, rank, f.group)
        });
        Combo { terms: merged }
    }

    pub fn single(field: FieldRef) -> Self {
        Combo::new([(1, field)])
    }

    pub fn terms(&self) -> &[(i64, FieldRef)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Net rotation coefficient of `robot` when every term is a rotation field.
    pub fn rotation_coefficient(&self, alloc: &GroupAllocation, robot: usize) -> i64 {
        self.terms
            .iter()
            .filter(|(_, f)| f.turns(alloc, robot))
            .map(|(c, _)| *c)
            .sum()
    }
}

impl fmt::Display for Combo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, field)) in self.terms.iter().enumerate() {
            let sign = if *c < 0 { "-" } else if i > 0 { "+" } else { "" };
            let mag = c.unsigned_abs();
            if mag == 1 {
                write!(f, "{sign}{field}")?;
            } else {
                write!(f, "{sign}{mag}{field}")?;
            }
        }
        Ok(())
    }
}

/// Binary tree of brackets with generator combinations at the leaves.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BracketExpr {
    Leaf(Combo),
    Bracket(Box<BracketExpr>, Box<BracketExpr>),
}

impl BracketExpr {
    pub fn leaf(field: FieldRef) -> Self {
        BracketExpr::Leaf(Combo::single(field))
    }

    pub fn bracket(a: BracketExpr, b: BracketExpr) -> Self {
        BracketExpr::Bracket(Box::new(a), Box::new(b))
    }

    /// Primitive order. A single generator counts 1; a combination of several
    /// generators is realized as one composite rotation layered on its
    /// partner and counts 2.
    pub fn order(&self) -> usize {
        match self {
            BracketExpr::Leaf(c) => {
                if c.terms().len() <= 1 {
                    1
                } else {
                    2
                }
            }
            BracketExpr::Bracket(a, b) => a.order() + b.order(),
        }
    }
}

impl fmt::Display for BracketExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BracketExpr::Leaf(c) => write!(f, "{c}"),
            BracketExpr::Bracket(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        invalid(alloc::format!("bracket expression: {what} at offset {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn number(&mut self) -> Option<i64> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        core::str::from_utf8(&self.src[start..self.pos]).ok()?.parse().ok()
    }

    fn expr(&mut self) -> Result<BracketExpr> {
        if self.peek() == Some(b'[') {
            self.pos += 1;
            let a = self.expr()?;
            if self.peek() != Some(b',') {
                return Err(self.err("expected ','"));
            }
            self.pos += 1;
            let b = self.expr()?;
            if self.peek() != Some(b']') {
                return Err(self.err("expected ']'"));
            }
            self.pos += 1;
            Ok(BracketExpr::bracket(a, b))
        } else {
            self.combo().map(BracketExpr::Leaf)
        }
    }

    fn combo(&mut self) -> Result<Combo> {
        let mut terms = Vec::new();
        let mut first = true;
        loop {
            let sign = match self.peek() {
                Some(b'+') if !first => {
                    self.pos += 1;
                    1
                }
                Some(b'-') => {
                    self.pos += 1;
                    -1
                }
                _ if first => 1,
                _ => break,
            };
            self.skip_ws();
            let coef = self.number().unwrap_or(1);
            let kind = match self.peek().map(|c| c.to_ascii_lowercase()) {
                Some(b'f') => FieldKind::F,
                Some(b'g') => FieldKind::G,
                Some(b'h') => FieldKind::H,
                _ => return Err(self.err("expected f, g or h")),
            };
            self.pos += 1;
            let index = self.number().ok_or_else(|| self.err("expected group index"))?;
            if index < 1 {
                return Err(self.err("group indices start at 1"));
            }
            terms.push((
                sign * coef,
                FieldRef {
                    kind,
                    group: index as usize - 1,
                },
            ));
            first = false;
        }
        let combo = Combo::new(terms);
        if combo.is_empty() {
            return Err(self.err("combination cancels to zero"));
        }
        Ok(combo)
    }
}

impl FromStr for BracketExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
        };
        let e = p.expr()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }
}

enum Effect {
    /// Net rotation coefficient per robot.
    Rotation(Vec<i64>),
    /// Robots that net-translate.
    Translation(Vec<usize>),
}

fn classify(expr: &BracketExpr, alloc: &GroupAllocation) -> Result<Effect> {
    match expr {
        BracketExpr::Leaf(combo) => {
            for (_, f) in combo.terms() {
                f.validate(alloc)?;
            }
            if combo.terms().iter().all(|(_, f)| f.is_rotation(alloc)) {
                let coeffs = (0..alloc.robots())
                    .map(|r| combo.rotation_coefficient(alloc, r))
                    .collect();
                return Ok(Effect::Rotation(coeffs));
            }
            match combo.terms() {
                [(_, field)] => Ok(Effect::Translation(alloc.members(field.group))),
                _ => Err(invalid(alloc::format!(
                    "leaf '{combo}' mixes translation fields; brackets need one translating side"
                ))),
            }
        }
        BracketExpr::Bracket(a, b) => match (classify(a, alloc)?, classify(b, alloc)?) {
            (Effect::Rotation(c), Effect::Translation(t))
            | (Effect::Translation(t), Effect::Rotation(c)) => Ok(Effect::Translation(
                t.into_iter().filter(|&r| c[r] != 0).collect(),
            )),
            // rotation fields commute, and so do translation fields
            (Effect::Rotation(_), Effect::Rotation(_)) => {
                Ok(Effect::Rotation(alloc::vec![0; alloc.robots()]))
            }
            (Effect::Translation(_), Effect::Translation(_)) => Ok(Effect::Translation(Vec::new())),
        },
    }
}

/// Robots net-translated by `expr`: for `[H, g_i]` these are the members of
/// `G_i` whose net rotation coefficient under `H` is nonzero. Purely
/// combinatorial.
pub fn affected_robots(expr: &BracketExpr, alloc: &GroupAllocation) -> Result<Vec<usize>> {
    match classify(expr, alloc)? {
        Effect::Translation(t) => Ok(t),
        Effect::Rotation(_) => Ok(Vec::new()),
    }
}

impl BracketExpr {
    /// Canonical text form.
    pub fn to_text(&self) -> String {
        alloc::format!("{self}")
    }
}
