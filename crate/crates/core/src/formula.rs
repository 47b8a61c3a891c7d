//! MELL formulas, linear negation, sequent contexts and their textual codec.
//!
//! Grammar: `X`, `X^`, `1`, `bot`, `(A*B)`, `(A|B)`, `!A`, `?A`. The Unicode
//! connectives `⊗`, `⅋` and `⊥` are accepted on input; output is always ASCII.
//! Contexts separate formulas with `,` and blocks with `;`; `()` is the empty
//! context.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Var(Arc<str>),
    DualVar(Arc<str>),
    One,
    Bot,
    Tensor(Arc<Formula>, Arc<Formula>),
    Par(Arc<Formula>, Arc<Formula>),
    OfCourse(Arc<Formula>),
    WhyNot(Arc<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected character {found:?} at byte {offset}")]
    Unexpected { offset: usize, found: char },
    #[error("unexpected end of input at byte {offset}")]
    Eof { offset: usize },
    #[error("unbalanced parenthesis opened at byte {offset}")]
    Unbalanced { offset: usize },
    #[error("empty block at byte {offset}")]
    EmptyBlock { offset: usize },
}

impl Formula {
    pub fn var(name: &str) -> Formula {
        Formula::Var(Arc::from(name))
    }

    pub fn dual_var(name: &str) -> Formula {
        Formula::DualVar(Arc::from(name))
    }

    pub fn tensor(a: Formula, b: Formula) -> Formula {
        Formula::Tensor(Arc::new(a), Arc::new(b))
    }

    pub fn par(a: Formula, b: Formula) -> Formula {
        Formula::Par(Arc::new(a), Arc::new(b))
    }

    pub fn of_course(a: Formula) -> Formula {
        Formula::OfCourse(Arc::new(a))
    }

    pub fn why_not(a: Formula) -> Formula {
        Formula::WhyNot(Arc::new(a))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Var(_) | Formula::DualVar(_))
    }

    pub fn dual(&self) -> Formula {
        match self {
            Formula::Var(x) => Formula::DualVar(x.clone()),
            Formula::DualVar(x) => Formula::Var(x.clone()),
            Formula::One => Formula::Bot,
            Formula::Bot => Formula::One,
            Formula::Tensor(a, b) => Formula::par(a.dual(), b.dual()),
            Formula::Par(a, b) => Formula::tensor(a.dual(), b.dual()),
            Formula::OfCourse(a) => Formula::why_not(a.dual()),
            Formula::WhyNot(a) => Formula::of_course(a.dual()),
        }
    }

    /// Immediate subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Tensor(a, b) | Formula::Par(a, b) => vec![a, b],
            Formula::OfCourse(a) | Formula::WhyNot(a) => vec![a],
            _ => vec![],
        }
    }

    /// The `A` of `?A`.
    pub fn why_not_body(&self) -> Option<&Formula> {
        match self {
            Formula::WhyNot(a) => Some(a),
            _ => None,
        }
    }

    /// The `A` of `!A`.
    pub fn of_course_body(&self) -> Option<&Formula> {
        match self {
            Formula::OfCourse(a) => Some(a),
            _ => None,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Var(x) => write!(f, "{x}"),
            Formula::DualVar(x) => write!(f, "{x}^"),
            Formula::One => write!(f, "1"),
            Formula::Bot => write!(f, "bot"),
            Formula::Tensor(a, b) => write!(f, "({a}*{b})"),
            Formula::Par(a, b) => write!(f, "({a}|{b})"),
            Formula::OfCourse(a) => write!(f, "!{a}"),
            Formula::WhyNot(a) => write!(f, "?{a}"),
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { src: s, pos: 0 };
        let f = p.formula()?;
        p.end()?;
        Ok(f)
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// A list of nonempty blocks of formulas.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Context {
    pub blocks: Vec<Vec<Formula>>,
}

impl Context {
    pub fn empty() -> Context {
        Context { blocks: Vec::new() }
    }

    pub fn new(blocks: Vec<Vec<Formula>>) -> Context {
        Context { blocks }
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn flatten(&self) -> Vec<Formula> {
        self.blocks.iter().flatten().cloned().collect()
    }

    /// Block index and offset inside it of the 1-based position `i`.
    pub fn locate(&self, i: usize) -> Option<(usize, usize)> {
        if i == 0 {
            return None;
        }
        let mut start = 1;
        for (k, b) in self.blocks.iter().enumerate() {
            if i < start + b.len() {
                return Some((k, i - start));
            }
            start += b.len();
        }
        None
    }

    /// 1-based position of the first formula of block `k`.
    pub fn block_start(&self, k: usize) -> usize {
        1 + self.blocks[..k].iter().map(Vec::len).sum::<usize>()
    }

    pub fn at(&self, i: usize) -> Option<&Formula> {
        self.locate(i).map(|(k, j)| &self.blocks[k][j])
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return write!(f, "()");
        }
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                write!(f, ";")?;
            }
            for (j, a) in b.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Context {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "()" {
            return Ok(Context::empty());
        }
        let mut p = Parser { src: s, pos: 0 };
        let mut blocks = vec![];
        loop {
            let start = p.pos;
            let mut block = vec![];
            if matches!(p.peek(), Some(';') | None) {
                return Err(ParseError::EmptyBlock { offset: start });
            }
            loop {
                block.push(p.formula()?);
                if p.peek() == Some(',') {
                    p.bump();
                } else {
                    break;
                }
            }
            blocks.push(block);
            match p.peek() {
                Some(';') => p.bump(),
                None => break,
                Some(c) => return Err(ParseError::Unexpected { offset: p.pos, found: c }),
            }
        }
        Ok(Context { blocks })
    }
}

impl Serialize for Context {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Context {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) {
        if let Some(c) = self.peek() {
            self.pos += c.len_utf8();
        }
    }

    fn end(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(ParseError::Unexpected { offset: self.pos, found: c }),
        }
    }

    fn expect_some(&self) -> Result<char, ParseError> {
        self.peek().ok_or(ParseError::Eof { offset: self.pos })
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let c = self.expect_some()?;
        match c {
            '1' => {
                self.bump();
                Ok(Formula::One)
            }
            '⊥' => {
                self.bump();
                Ok(Formula::Bot)
            }
            '!' => {
                self.bump();
                Ok(Formula::of_course(self.formula()?))
            }
            '?' => {
                self.bump();
                Ok(Formula::why_not(self.formula()?))
            }
            '(' => {
                let open = self.pos;
                self.bump();
                let a = self.formula()?;
                let op = match self.peek() {
                    None => return Err(ParseError::Unbalanced { offset: open }),
                    Some(op @ ('*' | '|' | '⊗' | '⅋')) => op,
                    Some(found) => return Err(ParseError::Unexpected { offset: self.pos, found }),
                };
                self.bump();
                let b = self.formula()?;
                match self.peek() {
                    Some(')') => self.bump(),
                    None => return Err(ParseError::Unbalanced { offset: open }),
                    Some(found) => return Err(ParseError::Unexpected { offset: self.pos, found }),
                }
                Ok(match op {
                    '*' | '⊗' => Formula::tensor(a, b),
                    _ => Formula::par(a, b),
                })
            }
            c if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                    self.bump();
                }
                let name = &self.src[start..self.pos];
                if name == "bot" {
                    return Ok(Formula::Bot);
                }
                if self.peek() == Some('^') || self.peek() == Some('⊥') {
                    self.bump();
                    Ok(Formula::dual_var(name))
                } else {
                    Ok(Formula::var(name))
                }
            }
            found => Err(ParseError::Unexpected { offset: self.pos, found }),
        }
    }
}

/// Smallest superset of `fs` closed under immediate subformulas and duality.
pub fn subformula_closure<'a, I>(fs: I) -> BTreeSet<Formula>
where
    I: IntoIterator<Item = &'a Formula>,
{
    let mut out = BTreeSet::new();
    let mut todo: Vec<Formula> = fs.into_iter().cloned().collect();
    while let Some(f) = todo.pop() {
        if out.contains(&f) {
            continue;
        }
        todo.push(f.dual());
        todo.extend(f.children().into_iter().cloned());
        out.insert(f);
    }
    out
}


#[cfg(test)]
mod tests {
    use super::strategies::*;
    use super::*;
    use proptest::prelude::*;

    fn f(s: &str) -> Formula {
        s.parse().unwrap()
    }

    #[test]
    fn parses_constructors() {
        assert_eq!(f("!1"), Formula::of_course(Formula::One));
        assert_eq!(f("(X*?bot)"), Formula::tensor(Formula::var("X"), Formula::why_not(Formula::Bot)));
        assert_eq!(f("(X⊗Y⊥)"), Formula::tensor(Formula::var("X"), Formula::dual_var("Y")));
        assert_eq!(f("(1⅋⊥)"), Formula::par(Formula::One, Formula::Bot));
        assert_eq!(f("bot_1"), Formula::var("bot_1"));
    }

    #[test]
    fn parse_errors_carry_offsets() {
        let err: ParseError = "?bot;!(( ?Y|Y^))".parse::<Context>().unwrap_err();
        assert_eq!(err, ParseError::Unexpected { offset: 8, found: ' ' });
        assert_eq!("(X*Y".parse::<Formula>().unwrap_err(), ParseError::Unbalanced { offset: 0 });
        assert!(matches!("(X*".parse::<Formula>(), Err(ParseError::Eof { .. })));
        assert!(matches!("X;;Y".parse::<Context>(), Err(ParseError::EmptyBlock { offset: 2 })));
        assert!(matches!("X Y".parse::<Formula>(), Err(ParseError::Unexpected { offset: 1, .. })));
    }

    #[test]
    fn context_codec() {
        let c: Context = "X^,(X*?bot),?!1;!(?Y|Y^),!1".parse().unwrap();
        assert_eq!(c.blocks.len(), 2);
        assert_eq!(c.len(), 5);
        assert_eq!(c.locate(4), Some((1, 0)));
        assert_eq!(c.at(2), Some(&f("(X*?bot)")));
        assert_eq!(c.to_string(), "X^,(X*?bot),?!1;!(?Y|Y^),!1");
        assert_eq!("()".parse::<Context>().unwrap(), Context::empty());
        assert_eq!(Context::empty().to_string(), "()");
    }

    #[test]
    fn dual_examples() {
        assert_eq!(Formula::One.dual(), Formula::Bot);
        assert_eq!(f("(X*Y)").dual(), f("(X^|Y^)"));
        assert_eq!(f("!(X|1)").dual(), f("?(X^*bot)"));
    }

    /// Fixed-point iteration over a worklist of strings, independent of the
    /// closure implementation above.
    fn closure_oracle(seed: &[&str]) -> BTreeSet<String> {
        let mut set: BTreeSet<String> = seed.iter().map(|s| s.to_string()).collect();
        loop {
            let mut next = set.clone();
            for s in &set {
                let g = f(s);
                next.insert(g.dual().to_string());
                for c in g.children() {
                    next.insert(c.to_string());
                }
            }
            if next == set {
                return set;
            }
            set = next;
        }
    }

    #[test]
    fn closure_examples() {
        let one = subformula_closure([&Formula::One]);
        assert_eq!(one, [Formula::One, Formula::Bot].into_iter().collect());
        assert!(subformula_closure(std::iter::empty()).is_empty());
        let got: BTreeSet<String> =
            subformula_closure([&f("!(X|Y)")]).iter().map(|g| g.to_string()).collect();
        let want = closure_oracle(&["!(X|Y)"]);
        assert_eq!(got, want);
        assert_eq!(got.len(), 8);
        for s in ["!(X|Y)", "?(X^*Y^)", "(X|Y)", "(X^*Y^)", "X", "X^", "Y", "Y^"] {
            assert!(got.contains(s), "{s}");
        }
    }

    proptest! {
        #[test]
        fn dual_is_involutive(a in formula()) {
            prop_assert_eq!(a.dual().dual(), a);
        }

        #[test]
        fn formula_roundtrip(a in formula()) {
            let text = a.to_string();
            prop_assert_eq!(text.parse::<Formula>().unwrap(), a);
        }

        #[test]
        fn context_roundtrip(c in context()) {
            let text = c.to_string();
            prop_assert_eq!(text.parse::<Context>().unwrap(), c);
        }

        #[test]
        fn closure_idempotent_and_monotone(a in formula(), b in formula()) {
            let ca = subformula_closure([&a]);
            prop_assert_eq!(subformula_closure(ca.iter()), ca.clone());
            let cab = subformula_closure([&a, &b]);
            prop_assert!(ca.is_subset(&cab));
        }
    }
}
