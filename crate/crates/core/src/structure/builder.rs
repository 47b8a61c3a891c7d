//! Terse construction of structures for fixtures, tests and generators.

use crate::formula::Formula;
use crate::graph::{FlagId, Label, NodeId, VertexId};

use super::{AxiomMode, Draft, Qps};

pub struct Builder {
    d: Draft,
}

impl Builder {
    pub fn new(mode: AxiomMode) -> Builder {
        Builder { d: Draft::new(Qps::empty(mode)) }
    }

    pub fn root(&mut self) -> NodeId {
        self.d.add_node(None)
    }

    pub fn child(&mut self, parent: NodeId) -> NodeId {
        self.d.add_node(Some(parent))
    }

    /// Add a cell with the given input and output types, written in the text grammar.
    pub fn cell(&mut self, label: Label, node: NodeId, inputs: &[&str], outputs: &[&str]) -> VertexId {
        let p = |s: &&str| s.parse::<Formula>().unwrap_or_else(|e| panic!("bad formula {s:?}: {e}"));
        let ins: Vec<Formula> = inputs.iter().map(p).collect();
        let outs: Vec<Formula> = outputs.iter().map(p).collect();
        self.d.add_vertex(label, node, &ins, &outs)
    }

    pub fn cell_f(&mut self, label: Label, node: NodeId, inputs: &[Formula], outputs: &[Formula]) -> VertexId {
        self.d.add_vertex(label, node, inputs, outputs)
    }

    pub fn out(&self, v: VertexId, k: usize) -> FlagId {
        self.d.q.graph.vertices[v].outputs[k]
    }

    pub fn inp(&self, v: VertexId, k: usize) -> FlagId {
        self.d.q.graph.vertices[v].inputs[k]
    }

    /// Connect output `k` of `src` to input `j` of `dst`.
    pub fn wire(&mut self, src: VertexId, k: usize, dst: VertexId, j: usize) {
        let (o, i) = (self.out(src, k), self.inp(dst, j));
        assert_eq!(self.d.q.graph.flags[o].ty, self.d.q.graph.flags[i].ty, "wire type mismatch");
        self.d.glue(o, i);
    }

    /// Append an input of type `ty` to `dst` fed by output `k` of `src`.
    pub fn feed(&mut self, src: VertexId, k: usize, dst: VertexId) {
        let o = self.out(src, k);
        let ty = self.d.q.graph.flags[o].ty.clone();
        let i = self.d.add_input(dst, ty);
        self.d.glue(o, i);
    }

    pub fn conclude(&mut self, tails: &[FlagId]) {
        self.d.set_tails(tails.to_vec());
    }

    pub fn finish(self) -> Qps {
        self.d.finish()
    }
}
