//! In-place editing of a structure with deferred compaction.

use crate::formula::Formula;
use crate::graph::{Flag, FlagId, Label, NodeId, Orient, Vertex, VertexId};

use super::Qps;

/// A structure under edit. Removed vertices and nodes are only marked; the
/// ids of everything else stay stable until [`Draft::finish`].
#[derive(Clone, Debug)]
pub struct Draft {
    pub q: Qps,
    dead_v: Vec<bool>,
    dead_n: Vec<bool>,
}

impl Draft {
    pub fn new(q: Qps) -> Draft {
        let (nv, nn) = (q.graph.vertices.len(), q.forest.len());
        Draft { q, dead_v: vec![false; nv], dead_n: vec![false; nn] }
    }

    pub fn is_alive(&self, v: VertexId) -> bool {
        !self.dead_v[v]
    }

    pub fn add_node(&mut self, parent: Option<NodeId>) -> NodeId {
        self.dead_n.push(false);
        self.q.forest.add(parent)
    }

    pub fn remove_node(&mut self, n: NodeId) {
        self.dead_n[n] = true;
    }

    pub fn set_parent(&mut self, n: NodeId, parent: Option<NodeId>) {
        self.q.forest.parent[n] = parent;
    }

    pub fn add_vertex(&mut self, label: Label, node: NodeId, inputs: &[Formula], outputs: &[Formula]) -> VertexId {
        let v = self.q.graph.vertices.len();
        self.q.graph.vertices.push(Vertex { label, inputs: vec![], outputs: vec![] });
        self.q.boxes.push(node);
        self.dead_v.push(false);
        for ty in inputs {
            let f = self.q.graph.push_flag(v, ty.clone(), Orient::In);
            self.q.graph.vertices[v].inputs.push(f);
        }
        for ty in outputs {
            let f = self.q.graph.push_flag(v, ty.clone(), Orient::Out);
            self.q.graph.vertices[v].outputs.push(f);
        }
        v
    }

    /// Add an input flag at the end of `v`'s inputs.
    pub fn add_input(&mut self, v: VertexId, ty: Formula) -> FlagId {
        let f = self.q.graph.push_flag(v, ty, Orient::In);
        self.q.graph.vertices[v].inputs.push(f);
        f
    }

    /// Add an output flag at the end of `v`'s outputs.
    pub fn add_output(&mut self, v: VertexId, ty: Formula) -> FlagId {
        let f = self.q.graph.push_flag(v, ty, Orient::Out);
        self.q.graph.vertices[v].outputs.push(f);
        f
    }

    /// Mark `v` dead and unglue every partner of its flags.
    pub fn remove_vertex(&mut self, v: VertexId) {
        self.dead_v[v] = true;
        let vx = &self.q.graph.vertices[v];
        let flags: Vec<FlagId> = vx.inputs.iter().chain(&vx.outputs).copied().collect();
        for f in flags {
            self.unglue(f);
        }
    }

    pub fn glue(&mut self, a: FlagId, b: FlagId) {
        debug_assert_eq!(self.q.graph.flags[a].ty, self.q.graph.flags[b].ty);
        debug_assert_ne!(self.q.graph.flags[a].orient, self.q.graph.flags[b].orient);
        self.unglue(a);
        self.unglue(b);
        self.q.graph.flags[a].partner = Some(b);
        self.q.graph.flags[b].partner = Some(a);
    }

    pub fn unglue(&mut self, f: FlagId) {
        if let Some(p) = self.q.graph.flags[f].partner.take() {
            self.q.graph.flags[p].partner = None;
        }
    }

    /// Move input flag `f` from its vertex to the end of `to`'s inputs.
    pub fn move_input(&mut self, f: FlagId, to: VertexId) {
        let from = self.q.graph.flags[f].vertex;
        self.q.graph.vertices[from].inputs.retain(|&x| x != f);
        self.q.graph.vertices[to].inputs.push(f);
        self.q.graph.flags[f].vertex = to;
    }

    /// Move output flag `f` from its vertex to the end of `to`'s outputs.
    pub fn move_output(&mut self, f: FlagId, to: VertexId) {
        let from = self.q.graph.flags[f].vertex;
        self.q.graph.vertices[from].outputs.retain(|&x| x != f);
        self.q.graph.vertices[to].outputs.push(f);
        self.q.graph.flags[f].vertex = to;
    }

    /// Drop an output flag from its vertex; its partner is unglued.
    pub fn drop_output(&mut self, f: FlagId) {
        self.unglue(f);
        let v = self.q.graph.flags[f].vertex;
        self.q.graph.vertices[v].outputs.retain(|&x| x != f);
        self.q.graph.tails.retain(|&t| t != f);
    }

    /// Drop an input flag from its vertex; its partner is unglued.
    pub fn drop_input(&mut self, f: FlagId) {
        self.unglue(f);
        let v = self.q.graph.flags[f].vertex;
        self.q.graph.vertices[v].inputs.retain(|&x| x != f);
    }

    pub fn set_box(&mut self, v: VertexId, n: NodeId) {
        self.q.boxes[v] = n;
    }

    pub fn set_tails(&mut self, tails: Vec<FlagId>) {
        self.q.graph.tails = tails;
    }

    pub fn tails(&self) -> &[FlagId] {
        &self.q.graph.tails
    }

    /// Compact away dead vertices, dropped flags and dead nodes.
    pub fn finish(self) -> Qps {
        let Draft { q, dead_v, dead_n } = self;
        let mut vnew = vec![usize::MAX; q.graph.vertices.len()];
        let mut nv = 0;
        for v in 0..q.graph.vertices.len() {
            if !dead_v[v] {
                vnew[v] = nv;
                nv += 1;
            }
        }
        let mut nnew = vec![usize::MAX; q.forest.len()];
        let mut nn = 0;
        for n in 0..q.forest.len() {
            if !dead_n[n] {
                nnew[n] = nn;
                nn += 1;
            }
        }
        // A flag survives when it is still listed on a live vertex.
        let mut fnew = vec![usize::MAX; q.graph.flags.len()];
        let mut nf = 0;
        for (v, vx) in q.graph.vertices.iter().enumerate() {
            if dead_v[v] {
                continue;
            }
            for &f in vx.inputs.iter().chain(&vx.outputs) {
                fnew[f] = nf;
                nf += 1;
            }
        }
        let mut out = Qps::empty(q.mode);
        let mut flags: Vec<Option<Flag>> = vec![None; nf];
        for (f, fl) in q.graph.flags.iter().enumerate() {
            if fnew[f] == usize::MAX {
                continue;
            }
            let mut fl = fl.clone();
            fl.vertex = vnew[fl.vertex];
            fl.partner = fl.partner.and_then(|p| (fnew[p] != usize::MAX).then_some(fnew[p]));
            flags[fnew[f]] = Some(fl);
        }
        out.graph.flags = flags.into_iter().map(|f| f.expect("every listed flag is renumbered")).collect();
        for (v, vx) in q.graph.vertices.iter().enumerate() {
            if dead_v[v] {
                continue;
            }
            out.graph.vertices.push(Vertex {
                label: vx.label,
                inputs: vx.inputs.iter().map(|&f| fnew[f]).collect(),
                outputs: vx.outputs.iter().map(|&f| fnew[f]).collect(),
            });
            out.boxes.push(nnew[q.boxes[v]]);
        }
        out.graph.tails = q.graph.tails.iter().filter(|&&t| fnew[t] != usize::MAX).map(|&t| fnew[t]).collect();
        out.forest.parent = (0..q.forest.len())
            .filter(|&n| !dead_n[n])
            .map(|n| q.forest.parent[n].map(|p| nnew[p]))
            .collect();
        out
    }
}
