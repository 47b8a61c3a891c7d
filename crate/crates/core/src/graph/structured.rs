//! Graphs decorated with cell labels, flag types, orientation and order.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{FlagId, Graph, VertexId};
use crate::formula::Formula;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Ax,
    Cut,
    One,
    Bot,
    Tensor,
    Par,
    WhyNot,
    OfCourse,
    Daimon,
}

impl Label {
    pub fn name(self) -> &'static str {
        match self {
            Label::Ax => "ax",
            Label::Cut => "cut",
            Label::One => "one",
            Label::Bot => "bot",
            Label::Tensor => "tensor",
            Label::Par => "par",
            Label::WhyNot => "whynot",
            Label::OfCourse => "ofcourse",
            Label::Daimon => "daimon",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Label::Ax => "ax",
            Label::Cut => "cut",
            Label::One => "1",
            Label::Bot => "⊥",
            Label::Tensor => "⊗",
            Label::Par => "⅋",
            Label::WhyNot => "?",
            Label::OfCourse => "!",
            Label::Daimon => "✠",
        }
    }

    /// Cells whose inputs carry a meaningful order in every mode.
    pub fn ordered_inputs(self) -> bool {
        matches!(self, Label::Tensor | Label::Par | Label::Cut)
    }

    pub fn is_exponential(self) -> bool {
        matches!(self, Label::WhyNot | Label::OfCourse)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orient {
    In,
    Out,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Flag {
    pub vertex: VertexId,
    pub ty: Formula,
    pub orient: Orient,
    pub partner: Option<FlagId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub label: Label,
    pub inputs: Vec<FlagId>,
    pub outputs: Vec<FlagId>,
}

/// A module: labeled vertices, typed oriented flags and an ordered list of tails.
///
/// The total flag order is the tails in order, then for each vertex its
/// inputs followed by its outputs that are not tails.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct StructuredGraph {
    pub vertices: Vec<Vertex>,
    pub flags: Vec<Flag>,
    pub tails: Vec<FlagId>,
}

#[derive(Clone, Debug)]
pub struct Corolla {
    pub label: Label,
    pub inputs: Vec<Formula>,
    pub outputs: Vec<Formula>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("flag ({0}, {1}) does not exist")]
    NoSuchFlag(usize, usize),
    #[error("gluing flags of types {0} and {1}")]
    ColorMismatch(Formula, Formula),
    #[error("gluing two flags of the same orientation")]
    OrientationMismatch,
    #[error("flag ({0}, {1}) glued twice")]
    DuplicateGluing(usize, usize),
}

/// A flag address: (corolla index, port index).
pub type Port = (usize, usize);

/// Build a graph from corollas and gluing pairs. Flags are addressed as
/// (corolla index, port index), inputs first then outputs. Unglued flags
/// become tails, in corolla order.
pub fn build_graph(corollas: &[Corolla], gluing: &[(Port, Port)]) -> Result<StructuredGraph, BuildError> {
    let mut g = StructuredGraph::default();
    let mut ports: Vec<Vec<FlagId>> = vec![];
    for c in corollas {
        let v = g.vertices.len();
        let mut vx = Vertex { label: c.label, inputs: vec![], outputs: vec![] };
        let mut ps = vec![];
        for ty in &c.inputs {
            let f = g.push_flag(v, ty.clone(), Orient::In);
            vx.inputs.push(f);
            ps.push(f);
        }
        for ty in &c.outputs {
            let f = g.push_flag(v, ty.clone(), Orient::Out);
            vx.outputs.push(f);
            ps.push(f);
        }
        g.vertices.push(vx);
        ports.push(ps);
    }
    let port = |(c, p): (usize, usize)| ports.get(c).and_then(|ps| ps.get(p)).copied().ok_or(BuildError::NoSuchFlag(c, p));
    for &(a, b) in gluing {
        let (fa, fb) = (port(a)?, port(b)?);
        if g.flags[fa].partner.is_some() {
            return Err(BuildError::DuplicateGluing(a.0, a.1));
        }
        if g.flags[fb].partner.is_some() || fa == fb {
            return Err(BuildError::DuplicateGluing(b.0, b.1));
        }
        if g.flags[fa].ty != g.flags[fb].ty {
            return Err(BuildError::ColorMismatch(g.flags[fa].ty.clone(), g.flags[fb].ty.clone()));
        }
        if g.flags[fa].orient == g.flags[fb].orient {
            return Err(BuildError::OrientationMismatch);
        }
        g.flags[fa].partner = Some(fb);
        g.flags[fb].partner = Some(fa);
    }
    g.tails = (0..g.flags.len()).filter(|&f| g.flags[f].partner.is_none()).collect();
    Ok(g)
}

impl StructuredGraph {
    pub fn push_flag(&mut self, vertex: VertexId, ty: Formula, orient: Orient) -> FlagId {
        self.flags.push(Flag { vertex, ty, orient, partner: None });
        self.flags.len() - 1
    }

    /// The underlying flags-and-involution graph.
    pub fn to_graph(&self) -> Graph {
        Graph {
            vertex_count: self.vertices.len(),
            boundary: self.flags.iter().map(|f| f.vertex).collect(),
            involution: self.flags.iter().enumerate().map(|(i, f)| f.partner.unwrap_or(i)).collect(),
            orient: self.flags.iter().map(|f| f.orient).collect(),
        }
    }

    /// Total order on flags as an explicit list.
    pub fn order(&self) -> Vec<FlagId> {
        let mut out = self.tails.clone();
        for v in &self.vertices {
            out.extend(v.inputs.iter().copied().filter(|f| self.flags[*f].partner.is_some()));
            out.extend(v.outputs.iter().copied().filter(|f| self.flags[*f].partner.is_some()));
        }
        out
    }

    /// Vertex at the other end of flag `f`, if it is glued.
    pub fn neighbor(&self, f: FlagId) -> Option<VertexId> {
        self.flags[f].partner.map(|p| self.flags[p].vertex)
    }

    /// Edges as (output flag, input flag).
    pub fn edges(&self) -> impl Iterator<Item = (FlagId, FlagId)> + '_ {
        self.flags.iter().enumerate().filter_map(|(i, f)| match (f.orient, f.partner) {
            (Orient::Out, Some(p)) => Some((i, p)),
            _ => None,
        })
    }

    /// Edge halves agree on type and disagree on orientation; the partner map
    /// is an involution; vertex flag lists match the flag table.
    pub fn is_well_formed(&self) -> bool {
        let flags_ok = self.flags.iter().enumerate().all(|(i, f)| {
            f.vertex < self.vertices.len()
                && match f.partner {
                    None => true,
                    Some(p) => {
                        p < self.flags.len()
                            && p != i
                            && self.flags[p].partner == Some(i)
                            && self.flags[p].ty == f.ty
                            && self.flags[p].orient != f.orient
                    }
                }
        });
        let vertices_ok = self.vertices.iter().enumerate().all(|(v, vx)| {
            vx.inputs.iter().all(|&f| self.flags[f].vertex == v && self.flags[f].orient == Orient::In)
                && vx.outputs.iter().all(|&f| self.flags[f].vertex == v && self.flags[f].orient == Orient::Out)
        });
        let counted: usize = self.vertices.iter().map(|v| v.inputs.len() + v.outputs.len()).sum();
        let tails_ok = self.tails.iter().all(|&t| self.flags[t].partner.is_none())
            && self.tails.len() == self.flags.iter().filter(|f| f.partner.is_none()).count();
        flags_ok && vertices_ok && tails_ok && counted == self.flags.len()
    }
}
