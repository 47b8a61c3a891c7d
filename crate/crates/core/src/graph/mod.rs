//! Flags-and-involution graphs, rooted forests, their reflexive-transitive
//! closure, graph morphisms and pullbacks.
//!
//! A graph is a set of flags (half-edges) with a boundary map to vertices and
//! an involution on flags: fixed points are tails, two-element orbits are edges.

mod iso;
mod structured;

pub use iso::{find_isomorphism, invariant_hash, Iso, IsoMode, IsoView};
pub use structured::{build_graph, BuildError, Corolla, Flag, Label, Orient, StructuredGraph, Vertex};

use std::collections::HashMap;

pub type VertexId = usize;
pub type FlagId = usize;
pub type NodeId = usize;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    pub vertex_count: usize,
    pub boundary: Vec<VertexId>,
    pub involution: Vec<FlagId>,
    pub orient: Vec<Orient>,
}

impl Graph {
    pub fn add_vertex(&mut self) -> VertexId {
        self.vertex_count += 1;
        self.vertex_count - 1
    }

    pub fn add_flag(&mut self, v: VertexId, orient: Orient) -> FlagId {
        let f = self.boundary.len();
        self.boundary.push(v);
        self.involution.push(f);
        self.orient.push(orient);
        f
    }

    pub fn glue(&mut self, a: FlagId, b: FlagId) {
        self.involution[a] = b;
        self.involution[b] = a;
    }

    pub fn is_tail(&self, f: FlagId) -> bool {
        self.involution[f] == f
    }

    /// Each edge once, as (out flag, in flag) when oriented, else (lower, higher).
    pub fn edges(&self) -> Vec<(FlagId, FlagId)> {
        (0..self.boundary.len())
            .filter(|&f| {
                let g = self.involution[f];
                g != f && (self.orient[f] == Orient::Out && self.orient[g] == Orient::In || self.orient[f] == self.orient[g] && f < g)
            })
            .map(|f| (f, self.involution[f]))
            .collect()
    }

    pub fn is_well_formed(&self) -> bool {
        let n = self.boundary.len();
        self.involution.len() == n
            && self.orient.len() == n
            && self.boundary.iter().all(|&v| v < self.vertex_count)
            && (0..n).all(|f| self.involution[f] < n && self.involution[self.involution[f]] == f)
    }
}

/// A pair of maps on vertices and flags.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Morphism {
    pub vertex_map: Vec<VertexId>,
    pub flag_map: Vec<FlagId>,
}

impl Morphism {
    /// Commutes with boundary and involution, and preserves orientation.
    pub fn is_oriented_morphism(&self, src: &Graph, tgt: &Graph) -> bool {
        self.vertex_map.len() == src.vertex_count
            && self.flag_map.len() == src.boundary.len()
            && (0..src.boundary.len()).all(|f| {
                let g = self.flag_map[f];
                g < tgt.boundary.len()
                    && tgt.boundary[g] == self.vertex_map[src.boundary[f]]
                    && tgt.involution[g] == self.flag_map[src.involution[f]]
                    && tgt.orient[g] == src.orient[f]
            })
    }
}

pub struct Connectivity {
    pub component: Vec<usize>,
    pub count: usize,
    pub is_forest: bool,
}

impl Connectivity {
    pub fn path_exists(&self, a: VertexId, b: VertexId) -> bool {
        self.component[a] == self.component[b]
    }

    pub fn classes(&self) -> Vec<Vec<VertexId>> {
        let mut out = vec![Vec::new(); self.count];
        for (v, &c) in self.component.iter().enumerate() {
            out[c].push(v);
        }
        out
    }
}

pub fn connectivity(g: &Graph) -> Connectivity {
    let mut uf = UnionFind::new(g.vertex_count);
    let mut is_forest = true;
    for (a, b) in g.edges() {
        if !uf.union(g.boundary[a], g.boundary[b]) {
            is_forest = false;
        }
    }
    let (component, count) = uf.labels();
    Connectivity { component, count, is_forest }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// False when already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    /// Dense class labels numbered by first occurrence.
    pub fn labels(&mut self) -> (Vec<usize>, usize) {
        let n = self.parent.len();
        let mut label = vec![usize::MAX; n];
        let mut out = vec![0; n];
        let mut count = 0;
        for (x, o) in out.iter_mut().enumerate() {
            let r = self.find(x);
            if label[r] == usize::MAX {
                label[r] = count;
                count += 1;
            }
            *o = label[r];
        }
        (out, count)
    }
}

/// Forest of rooted trees, edges oriented from child to parent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RootedForest {
    pub parent: Vec<Option<NodeId>>,
}

impl RootedForest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn roots_only(n: usize) -> Self {
        RootedForest { parent: vec![None; n] }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn add(&mut self, parent: Option<NodeId>) -> NodeId {
        self.parent.push(parent);
        self.parent.len() - 1
    }

    pub fn roots(&self) -> Vec<NodeId> {
        (0..self.len()).filter(|&n| self.parent[n].is_none()).collect()
    }

    pub fn is_root(&self, n: NodeId) -> bool {
        self.parent[n].is_none()
    }

    pub fn children(&self, n: NodeId) -> Vec<NodeId> {
        (0..self.len()).filter(|&c| self.parent[c] == Some(n)).collect()
    }

    pub fn root_of(&self, mut n: NodeId) -> NodeId {
        while let Some(p) = self.parent[n] {
            n = p;
        }
        n
    }

    pub fn depth(&self, mut n: NodeId) -> usize {
        let mut d = 0;
        while let Some(p) = self.parent[n] {
            n = p;
            d += 1;
        }
        d
    }

    pub fn is_ancestor_or_self(&self, anc: NodeId, mut n: NodeId) -> bool {
        loop {
            if n == anc {
                return true;
            }
            match self.parent[n] {
                Some(p) => n = p,
                None => return false,
            }
        }
    }

    /// Nodes from `from` up to `to` inclusive, when `to` is an ancestor-or-self.
    pub fn path(&self, from: NodeId, to: NodeId) -> Option<Vec<NodeId>> {
        let mut out = vec![from];
        let mut n = from;
        while n != to {
            n = self.parent[n]?;
            out.push(n);
        }
        Some(out)
    }

    /// Nodes of the subtree at `n`, in preorder.
    pub fn subtree(&self, n: NodeId) -> Vec<NodeId> {
        let kids = self.children_table();
        let mut out = vec![];
        let mut stack = vec![n];
        while let Some(x) = stack.pop() {
            out.push(x);
            stack.extend(kids[x].iter().rev());
        }
        out
    }

    pub fn children_table(&self) -> Vec<Vec<NodeId>> {
        let mut kids = vec![Vec::new(); self.len()];
        for (c, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                kids[*p].push(c);
            }
        }
        kids
    }

    /// All nodes, roots first in index order, each tree in preorder.
    pub fn preorder(&self) -> Vec<NodeId> {
        let kids = self.children_table();
        let mut out = vec![];
        for r in self.roots() {
            let mut stack = vec![r];
            while let Some(x) = stack.pop() {
                out.push(x);
                stack.extend(kids[x].iter().rev());
            }
        }
        out
    }

    pub fn is_acyclic(&self) -> bool {
        (0..self.len()).all(|n| {
            let mut seen = 0;
            let mut x = n;
            while let Some(p) = self.parent[x] {
                if p >= self.len() {
                    return false;
                }
                x = p;
                seen += 1;
                if seen > self.len() {
                    return false;
                }
            }
            true
        })
    }

    /// The forest as a graph: every node has one out flag, glued to an in
    /// flag of its parent or left as a tail at a root.
    pub fn as_graph(&self) -> Graph {
        let mut g = Graph { vertex_count: self.len(), ..Graph::default() };
        for n in 0..self.len() {
            let out = g.add_flag(n, Orient::Out);
            if let Some(p) = self.parent[n] {
                let inp = g.add_flag(p, Orient::In);
                g.glue(out, inp);
            }
        }
        g
    }
}

/// Reflexive-transitive closure: one edge per oriented path, plus the root tails.
pub struct Closure {
    pub graph: Graph,
    path_flags: HashMap<(NodeId, NodeId), (FlagId, FlagId)>,
    root_tail: HashMap<NodeId, FlagId>,
}

impl Closure {
    /// (out flag at `from`, in flag at `to`) of the path `from -> to`.
    pub fn path_flags(&self, from: NodeId, to: NodeId) -> Option<(FlagId, FlagId)> {
        self.path_flags.get(&(from, to)).copied()
    }

    pub fn root_tail(&self, r: NodeId) -> Option<FlagId> {
        self.root_tail.get(&r).copied()
    }

    pub fn edge_count(&self) -> usize {
        self.path_flags.len()
    }
}

pub fn closure(f: &RootedForest) -> Closure {
    let mut g = Graph { vertex_count: f.len(), ..Graph::default() };
    let mut path_flags = HashMap::new();
    let mut root_tail = HashMap::new();
    for a in 0..f.len() {
        let mut b = Some(a);
        while let Some(x) = b {
            let out = g.add_flag(a, Orient::Out);
            let inp = g.add_flag(x, Orient::In);
            g.glue(out, inp);
            path_flags.insert((a, x), (out, inp));
            b = f.parent[x];
        }
        if f.parent[a].is_none() {
            root_tail.insert(a, g.add_flag(a, Orient::Out));
        }
    }
    Closure { graph: g, path_flags, root_tail }
}

/// Lift a parent-preserving node map between forests to their closures.
pub fn closure_map(src: &RootedForest, src_cl: &Closure, h: &[NodeId], tgt_cl: &Closure) -> Morphism {
    let mut flag_map = vec![usize::MAX; src_cl.graph.boundary.len()];
    for a in 0..src.len() {
        let mut b = Some(a);
        while let Some(x) = b {
            let (o, i) = src_cl.path_flags(a, x).expect("closure path");
            let (to, ti) = tgt_cl.path_flags(h[a], h[x]).expect("image path");
            flag_map[o] = to;
            flag_map[i] = ti;
            b = src.parent[x];
        }
        if let Some(t) = src_cl.root_tail(a) {
            flag_map[t] = tgt_cl.root_tail(h[a]).expect("root maps to root");
        }
    }
    Morphism { vertex_map: h.to_vec(), flag_map }
}

pub struct Pullback {
    pub graph: Graph,
    /// First projection, onto the source of `left`.
    pub p_left: Morphism,
    /// Second projection, onto the source of `right`.
    pub p_right: Morphism,
}

/// Pullback of `left: a -> c` and `right: b -> c`, computed as the set of
/// compatible vertex pairs and flag pairs.
pub fn pullback(a: &Graph, left: &Morphism, b: &Graph, right: &Morphism) -> Pullback {
    let mut by_vertex: HashMap<VertexId, Vec<VertexId>> = HashMap::new();
    for x in 0..b.vertex_count {
        by_vertex.entry(right.vertex_map[x]).or_default().push(x);
    }
    let mut by_flag: HashMap<FlagId, Vec<FlagId>> = HashMap::new();
    for g in 0..b.boundary.len() {
        by_flag.entry(right.flag_map[g]).or_default().push(g);
    }
    let mut graph = Graph::default();
    let mut p_left = Morphism::default();
    let mut p_right = Morphism::default();
    let mut vid: HashMap<(VertexId, VertexId), VertexId> = HashMap::new();
    for v in 0..a.vertex_count {
        for &x in by_vertex.get(&left.vertex_map[v]).map(Vec::as_slice).unwrap_or(&[]) {
            vid.insert((v, x), graph.add_vertex());
            p_left.vertex_map.push(v);
            p_right.vertex_map.push(x);
        }
    }
    let mut fid: HashMap<(FlagId, FlagId), FlagId> = HashMap::new();
    for f in 0..a.boundary.len() {
        for &g in by_flag.get(&left.flag_map[f]).map(Vec::as_slice).unwrap_or(&[]) {
            let v = vid[&(a.boundary[f], b.boundary[g])];
            fid.insert((f, g), graph.add_flag(v, a.orient[f]));
            p_left.flag_map.push(f);
            p_right.flag_map.push(g);
        }
    }
    for (&(f, g), &id) in &fid {
        let partner = fid[&(a.involution[f], b.involution[g])];
        graph.involution[id] = partner;
    }
    Pullback { graph, p_left, p_right }
}
