//! Elementary steps, their text syntax and their typing on contexts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::formula::{Context, Formula};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StepKind {
    Exc,
    Mix,
    Ax,
    Cut,
    Dai,
    One,
    Bot,
    Tensor,
    Par,
    Contr,
    Der,
    Weak,
    Box,
}

impl StepKind {
    pub const ALL: [StepKind; 13] = [
        StepKind::Exc,
        StepKind::Mix,
        StepKind::Ax,
        StepKind::Cut,
        StepKind::Dai,
        StepKind::One,
        StepKind::Bot,
        StepKind::Tensor,
        StepKind::Par,
        StepKind::Contr,
        StepKind::Der,
        StepKind::Weak,
        StepKind::Box,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StepKind::Exc => "exc",
            StepKind::Mix => "mix",
            StepKind::Ax => "ax",
            StepKind::Cut => "cut",
            StepKind::Dai => "dai",
            StepKind::One => "one",
            StepKind::Bot => "bot",
            StepKind::Tensor => "tensor",
            StepKind::Par => "par",
            StepKind::Contr => "contr",
            StepKind::Der => "der",
            StepKind::Weak => "weak",
            StepKind::Box => "box",
        }
    }

    /// Rules that delete a whole block made of one input-free cell.
    pub fn is_hypothesis(self) -> bool {
        matches!(self, StepKind::Ax | StepKind::Dai | StepKind::One | StepKind::Bot | StepKind::Weak)
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One generator of the path category, acting at the 1-based position `i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub kind: StepKind,
    pub i: usize,
    /// The cut formula; required for `cut`, absent otherwise.
    pub cut: Option<Formula>,
    /// For `contr`: the first `h+1` inputs go to `i`, the other `k+1` to `i+1`.
    pub split: Option<(usize, usize)>,
}

impl Step {
    pub fn new(kind: StepKind, i: usize) -> Step {
        Step { kind, i, cut: None, split: None }
    }

    pub fn cut(i: usize, a: Formula) -> Step {
        Step { kind: StepKind::Cut, i, cut: Some(a), split: None }
    }

    pub fn contr_split(i: usize, h: usize, k: usize) -> Step {
        Step { kind: StepKind::Contr, i, cut: None, split: Some((h, k)) }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.kind, self.i)?;
        if let Some(a) = &self.cut {
            write!(f, "{{{a}}}")?;
        }
        if let Some((h, k)) = self.split {
            write!(f, "({h},{k})")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepParseError {
    #[error("step {0:?}: expected kind@index")]
    Shape(String),
    #[error("step {0:?}: unknown kind")]
    Kind(String),
    #[error("step {0:?}: bad index")]
    Index(String),
    #[error("step {0:?}: cut needs a formula in braces")]
    CutFormula(String),
    #[error("step {token:?}: {source}")]
    Formula { token: String, source: crate::formula::ParseError },
    #[error("step {0:?}: bad contraction split")]
    Split(String),
    #[error("step {0:?}: unexpected payload")]
    Payload(String),
}

impl FromStr for Step {
    type Err = StepParseError;

    fn from_str(s: &str) -> Result<Step, StepParseError> {
        let (kind, rest) = s.split_once('@').ok_or_else(|| StepParseError::Shape(s.into()))?;
        let kind = StepKind::ALL
            .into_iter()
            .find(|k| k.name() == kind)
            .ok_or_else(|| StepParseError::Kind(s.into()))?;
        let digits = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        let i: usize = rest[..digits].parse().map_err(|_| StepParseError::Index(s.into()))?;
        let payload = &rest[digits..];
        let mut step = Step::new(kind, i);
        match kind {
            StepKind::Cut => {
                let inner = payload
                    .strip_prefix('{')
                    .and_then(|p| p.strip_suffix('}'))
                    .ok_or_else(|| StepParseError::CutFormula(s.into()))?;
                let a = inner.parse().map_err(|source| StepParseError::Formula { token: s.into(), source })?;
                step.cut = Some(a);
            }
            StepKind::Contr if !payload.is_empty() => {
                let inner = payload
                    .strip_prefix('(')
                    .and_then(|p| p.strip_suffix(')'))
                    .ok_or_else(|| StepParseError::Split(s.into()))?;
                let (h, k) = inner.split_once(',').ok_or_else(|| StepParseError::Split(s.into()))?;
                let h = h.trim().parse().map_err(|_| StepParseError::Split(s.into()))?;
                let k = k.trim().parse().map_err(|_| StepParseError::Split(s.into()))?;
                step.split = Some((h, k));
            }
            _ if !payload.is_empty() => return Err(StepParseError::Payload(s.into())),
            _ => {}
        }
        Ok(step)
    }
}

impl Serialize for Step {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Step {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Steps separated by whitespace; `#` starts a comment running to the end of the line.
pub fn parse_path(text: &str) -> Result<Vec<Step>, StepParseError> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
        .map(str::parse)
        .collect()
}

pub fn format_path(steps: &[Step]) -> String {
    steps.iter().map(Step::to_string).collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("{step}: position out of range for a context of length {len}")]
    OutOfRange { step: Step, len: usize },
    #[error("{step}: {reason}")]
    Shape { step: Step, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {index} of the path: {error}")]
pub struct PathTypeError {
    /// 0-based index of the first ill-typed step.
    pub index: usize,
    pub error: TypeError,
}

impl Step {
    /// The target context, if the step applies to `ctx`.
    pub fn apply_type(&self, ctx: &Context) -> Result<Context, TypeError> {
        let shape = |reason: &str| TypeError::Shape { step: self.clone(), reason: reason.into() };
        let i = self.i;
        if self.kind == StepKind::Cut {
            // Cut appends two formulas after position i-1, the end of a block.
            let a = self.cut.clone().ok_or_else(|| shape("cut without a formula"))?;
            let (k, j) = i
                .checked_sub(1)
                .and_then(|p| ctx.locate(p))
                .ok_or(TypeError::OutOfRange { step: self.clone(), len: ctx.len() })?;
            if j + 1 != ctx.blocks[k].len() {
                return Err(shape("position i-1 is not the last of its block"));
            }
            let mut out = ctx.clone();
            let d = a.dual();
            out.blocks[k].extend([a, d]);
            return Ok(out);
        }
        if self.cut.is_some() {
            return Err(shape("only cut carries a formula"));
        }
        if self.split.is_some() && self.kind != StepKind::Contr {
            return Err(shape("only contraction carries a split"));
        }
        let (k, j) = ctx.locate(i).ok_or(TypeError::OutOfRange { step: self.clone(), len: ctx.len() })?;
        let block = &ctx.blocks[k];
        let c = &block[j];
        let mut out = ctx.clone();
        let same_block_next = || -> Result<(), TypeError> {
            if j + 1 < block.len() {
                Ok(())
            } else {
                Err(shape("positions i and i+1 are not in the same block"))
            }
        };
        let singleton = |want: &dyn Fn(&Formula) -> bool, what: &str| -> Result<(), TypeError> {
            if block.len() == 1 && want(c) {
                Ok(())
            } else {
                Err(shape(&format!("block is not a single {what}")))
            }
        };
        match self.kind {
            StepKind::Exc => {
                same_block_next()?;
                out.blocks[k].swap(j, j + 1);
            }
            StepKind::Mix => {
                same_block_next()?;
                let right = out.blocks[k].split_off(j + 1);
                out.blocks.insert(k + 1, right);
            }
            StepKind::Ax => {
                if block.len() != 2 || j != 0 || block[0].dual() != block[1] {
                    return Err(shape("block is not a dual pair starting at i"));
                }
                out.blocks.remove(k);
            }
            StepKind::Dai => {
                out.blocks.remove(k);
            }
            StepKind::One => {
                singleton(&|f| *f == Formula::One, "1")?;
                out.blocks.remove(k);
            }
            StepKind::Bot => {
                singleton(&|f| *f == Formula::Bot, "bot")?;
                out.blocks.remove(k);
            }
            StepKind::Weak => {
                singleton(&|f| f.why_not_body().is_some(), "?-formula")?;
                out.blocks.remove(k);
            }
            StepKind::Tensor | StepKind::Par => {
                let parts = match (self.kind, c) {
                    (StepKind::Tensor, Formula::Tensor(a, b)) | (StepKind::Par, Formula::Par(a, b)) => {
                        [(**a).clone(), (**b).clone()]
                    }
                    _ => return Err(shape(&format!("head connective of {c} does not match"))),
                };
                out.blocks[k].splice(j..=j, parts);
            }
            StepKind::Contr => {
                if c.why_not_body().is_none() {
                    return Err(shape(&format!("{c} is not a ?-formula")));
                }
                out.blocks[k].insert(j, c.clone());
            }
            StepKind::Der => {
                let a = c.why_not_body().ok_or_else(|| shape(&format!("{c} is not a ?-formula")))?;
                out.blocks[k][j] = a.clone();
            }
            StepKind::Box => {
                let a = c.of_course_body().ok_or_else(|| shape(&format!("{c} is not a !-formula")))?;
                if block.iter().enumerate().any(|(x, f)| x != j && f.why_not_body().is_none()) {
                    return Err(shape("the rest of the block is not made of ?-formulas"));
                }
                out.blocks[k][j] = a.clone();
            }
            StepKind::Cut => unreachable!("handled above"),
        }
        Ok(out)
    }
}

/// The target of a whole path, or the first ill-typed step.
pub fn typecheck_path(steps: &[Step], ctx: &Context) -> Result<Context, PathTypeError> {
    let mut cur = ctx.clone();
    for (index, s) in steps.iter().enumerate() {
        cur = s.apply_type(&cur).map_err(|error| PathTypeError { index, error })?;
    }
    Ok(cur)
}

/// Contexts before each step and the final one.
pub fn path_contexts(steps: &[Step], ctx: &Context) -> Result<Vec<Context>, PathTypeError> {
    let mut out = vec![ctx.clone()];
    for (index, s) in steps.iter().enumerate() {
        let next = s.apply_type(out.last().expect("nonempty")).map_err(|error| PathTypeError { index, error })?;
        out.push(next);
    }
    Ok(out)
}
