//! Quasi-proof-structures: a module, a box-forest and the box map.
//!
//! The box map is stored on vertices only; in a forest the oriented path
//! between two nodes is unique, so the image of every edge is determined.
//! Blocks of conclusions are ordered by the position of their first conclusion.

mod builder;
mod draft;
mod measure;
mod validate;

pub use builder::Builder;
pub use draft::Draft;
pub use measure::{component_size, size_measure, ComponentSize, SizeMeasure};
pub use validate::{validate_classify, Classification, Violation};

use serde::{Deserialize, Serialize};

use crate::formula::{Context, Formula};
use crate::graph::{
    closure, find_isomorphism, invariant_hash, FlagId, Iso, IsoMode, IsoView, Label, Morphism, NodeId, Orient,
    RootedForest, StructuredGraph, VertexId,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxiomMode {
    /// Axiom outputs must be atomic.
    #[default]
    Atomic,
    /// Axioms on arbitrary formulas; emptyings may keep `?`-cells.
    Eta,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Qps {
    pub mode: AxiomMode,
    pub graph: StructuredGraph,
    pub forest: RootedForest,
    /// Box-forest node of each vertex.
    pub boxes: Vec<NodeId>,
}

impl Qps {
    pub fn empty(mode: AxiomMode) -> Qps {
        Qps { mode, graph: StructuredGraph::default(), forest: RootedForest::new(), boxes: vec![] }
    }

    pub fn is_empty(&self) -> bool {
        self.graph.vertices.is_empty() && self.forest.is_empty()
    }

    pub fn conclusions(&self) -> &[FlagId] {
        &self.graph.tails
    }

    pub fn label(&self, v: VertexId) -> Label {
        self.graph.vertices[v].label
    }

    pub fn ty(&self, f: FlagId) -> &Formula {
        &self.graph.flags[f].ty
    }

    pub fn vertex_of(&self, f: FlagId) -> VertexId {
        self.graph.flags[f].vertex
    }

    /// Vertex feeding input flag `f`.
    pub fn source(&self, f: FlagId) -> Option<VertexId> {
        self.graph.neighbor(f)
    }

    pub fn view(&self) -> IsoView<'_> {
        IsoView { graph: &self.graph, forest: &self.forest, boxes: &self.boxes }
    }

    pub fn root_of_vertex(&self, v: VertexId) -> NodeId {
        self.forest.root_of(self.boxes[v])
    }

    /// Roots in block order, each with its conclusions in order. Roots without
    /// conclusions come last.
    pub fn blocks(&self) -> Vec<(NodeId, Vec<FlagId>)> {
        let mut out: Vec<(NodeId, Vec<FlagId>)> = vec![];
        for &t in &self.graph.tails {
            let r = self.root_of_vertex(self.vertex_of(t));
            match out.iter_mut().find(|(x, _)| *x == r) {
                Some((_, fs)) => fs.push(t),
                None => out.push((r, vec![t])),
            }
        }
        for r in self.forest.roots() {
            if !out.iter().any(|(x, _)| *x == r) {
                out.push((r, vec![]));
            }
        }
        out
    }

    /// 1-based position of each conclusion flag.
    pub fn position(&self, f: FlagId) -> Option<usize> {
        self.graph.tails.iter().position(|&t| t == f).map(|p| p + 1)
    }

    pub fn conclusion(&self, i: usize) -> Option<FlagId> {
        i.checked_sub(1).and_then(|k| self.graph.tails.get(k)).copied()
    }

    pub fn type_of(&self) -> Context {
        Context::new(
            self.blocks()
                .into_iter()
                .map(|(_, fs)| fs.iter().map(|&f| self.ty(f).clone()).collect::<Vec<_>>())
                .filter(|b| !b.is_empty())
                .collect(),
        )
    }

    /// Vertices living in the tree of root `r`.
    pub fn vertices_under(&self, r: NodeId) -> Vec<VertexId> {
        (0..self.graph.vertices.len()).filter(|&v| self.root_of_vertex(v) == r).collect()
    }

    /// Vertices whose box is exactly `n`.
    pub fn vertices_in(&self, n: NodeId) -> Vec<VertexId> {
        (0..self.graph.vertices.len()).filter(|&v| self.boxes[v] == n).collect()
    }

    /// One proof-structure per root, in block order.
    pub fn components(&self) -> Vec<Qps> {
        self.blocks().into_iter().map(|(r, _)| self.component(r)).collect()
    }

    pub fn component(&self, r: NodeId) -> Qps {
        let keep_v: Vec<bool> = (0..self.graph.vertices.len()).map(|v| self.root_of_vertex(v) == r).collect();
        let keep_n: Vec<bool> = (0..self.forest.len()).map(|n| self.forest.root_of(n) == r).collect();
        self.restrict(&keep_v, &keep_n)
    }

    /// Sub-structure on the kept vertices and nodes; flags whose partner is
    /// dropped become tails, appended after the surviving tails.
    pub fn restrict(&self, keep_v: &[bool], keep_n: &[bool]) -> Qps {
        let mut d = Draft::new(self.clone());
        for v in (0..keep_v.len()).filter(|&v| !keep_v[v]) {
            d.remove_vertex(v);
        }
        for n in (0..keep_n.len()).filter(|&n| !keep_n[n]) {
            d.remove_node(n);
        }
        let mut tails: Vec<FlagId> = self.graph.tails.iter().copied().filter(|&t| keep_v[self.vertex_of(t)]).collect();
        for (f, fl) in self.graph.flags.iter().enumerate() {
            if keep_v[fl.vertex] && fl.orient == Orient::Out && fl.partner.is_some_and(|p| !keep_v[self.vertex_of(p)]) {
                tails.push(f);
            }
        }
        d.set_tails(tails);
        d.finish()
    }

    /// Disjoint union, blocks of `self` first.
    pub fn juxtapose(&self, other: &Qps) -> Qps {
        let fo = self.graph.flags.len();
        let vo = self.graph.vertices.len();
        let no = self.forest.len();
        let mut out = self.clone();
        for fl in &other.graph.flags {
            let mut fl = fl.clone();
            fl.vertex += vo;
            fl.partner = fl.partner.map(|p| p + fo);
            out.graph.flags.push(fl);
        }
        for vx in &other.graph.vertices {
            let mut vx = vx.clone();
            vx.inputs.iter_mut().for_each(|f| *f += fo);
            vx.outputs.iter_mut().for_each(|f| *f += fo);
            out.graph.vertices.push(vx);
        }
        out.graph.tails.extend(other.graph.tails.iter().map(|t| t + fo));
        out.forest.parent.extend(other.forest.parent.iter().map(|p| p.map(|p| p + no)));
        out.boxes.extend(other.boxes.iter().map(|b| b + no));
        out
    }

    /// Edge path in the forest for the edge whose output flag is `f`.
    pub fn edge_path(&self, f: FlagId) -> Option<Vec<NodeId>> {
        let p = self.graph.flags[f].partner?;
        let (src, dst) = if self.graph.flags[f].orient == Orient::Out { (f, p) } else { (p, f) };
        self.forest.path(self.boxes[self.vertex_of(src)], self.boxes[self.vertex_of(dst)])
    }

    /// The box map as an oriented morphism into the closure of the forest.
    pub fn box_morphism(&self) -> Option<(Morphism, crate::graph::Closure)> {
        let cl = closure(&self.forest);
        let mut flag_map = vec![0; self.graph.flags.len()];
        for (f, fl) in self.graph.flags.iter().enumerate() {
            let b = self.boxes[fl.vertex];
            flag_map[f] = match fl.partner {
                None => cl.root_tail(b)?,
                Some(p) => {
                    let pb = self.boxes[self.vertex_of(p)];
                    match fl.orient {
                        Orient::Out => cl.path_flags(b, pb)?.0,
                        Orient::In => cl.path_flags(pb, b)?.1,
                    }
                }
            };
        }
        Some((Morphism { vertex_map: self.boxes.clone(), flag_map }, cl))
    }

    pub fn invariant_hash(&self) -> u64 {
        invariant_hash(self.view())
    }
}

pub fn structure_iso(a: &Qps, b: &Qps, mode: IsoMode) -> Option<Iso> {
    find_isomorphism(a.view(), b.view(), mode)
}

pub fn is_iso(a: &Qps, b: &Qps) -> bool {
    structure_iso(a, b, IsoMode::Standard).is_some()
}
