//! Isomorphism of structured graphs equipped with a box-forest.
//!
//! Backtracking unification seeded by the ordered tails. Inputs of `⊗`/`⅋`
//! are matched positionally; inputs of `?`/`!` positionally only in rigid
//! mode; `cut` inputs, `ax` outputs and `✠` outputs form unordered groups.
//! Vertices unreachable from the tails and cell-free forest nodes are matched
//! by a final backtracking pass.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use super::{FlagId, Label, NodeId, RootedForest, StructuredGraph, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IsoMode {
    /// Also preserves the order of `?`/`!` inputs.
    Rigid,
    /// `?`/`!` inputs are unordered.
    Standard,
}

#[derive(Clone, Copy)]
pub struct IsoView<'a> {
    pub graph: &'a StructuredGraph,
    pub forest: &'a RootedForest,
    pub boxes: &'a [NodeId],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Iso {
    pub vertex_map: Vec<VertexId>,
    pub flag_map: Vec<FlagId>,
    pub node_map: Vec<NodeId>,
}

#[derive(Clone)]
enum Pair {
    Flag(FlagId, FlagId),
    Vertex(VertexId, VertexId),
    Node(NodeId, NodeId),
}

#[derive(Clone)]
struct State {
    fmap: Vec<Option<FlagId>>,
    finv: Vec<Option<FlagId>>,
    vmap: Vec<Option<VertexId>>,
    vinv: Vec<Option<VertexId>>,
    nmap: Vec<Option<NodeId>>,
    ninv: Vec<Option<NodeId>>,
    queue: Vec<Pair>,
    groups: Vec<(Vec<FlagId>, Vec<FlagId>)>,
}

struct Ctx<'a> {
    a: IsoView<'a>,
    b: IsoView<'a>,
    mode: IsoMode,
    depth_a: Vec<usize>,
    depth_b: Vec<usize>,
}

pub fn find_isomorphism(a: IsoView<'_>, b: IsoView<'_>, mode: IsoMode) -> Option<Iso> {
    let (ga, gb) = (a.graph, b.graph);
    if ga.vertices.len() != gb.vertices.len()
        || ga.flags.len() != gb.flags.len()
        || ga.tails.len() != gb.tails.len()
        || a.forest.len() != b.forest.len()
        || label_counts(ga) != label_counts(gb)
    {
        return None;
    }
    let ctx = Ctx {
        a,
        b,
        mode,
        depth_a: (0..a.forest.len()).map(|n| a.forest.depth(n)).collect(),
        depth_b: (0..b.forest.len()).map(|n| b.forest.depth(n)).collect(),
    };
    let mut st = State {
        fmap: vec![None; ga.flags.len()],
        finv: vec![None; gb.flags.len()],
        vmap: vec![None; ga.vertices.len()],
        vinv: vec![None; gb.vertices.len()],
        nmap: vec![None; a.forest.len()],
        ninv: vec![None; b.forest.len()],
        queue: vec![],
        groups: vec![],
    };
    for (&fa, &fb) in ga.tails.iter().zip(&gb.tails) {
        st.queue.push(Pair::Flag(fa, fb));
    }
    let done = ctx.search(st)?;
    Some(Iso {
        vertex_map: done.vmap.into_iter().map(Option::unwrap).collect(),
        flag_map: done.fmap.into_iter().map(Option::unwrap).collect(),
        node_map: done.nmap.into_iter().map(Option::unwrap).collect(),
    })
}

fn label_counts(g: &StructuredGraph) -> [usize; 9] {
    let mut c = [0; 9];
    for v in &g.vertices {
        c[v.label as usize] += 1;
    }
    c
}

impl Ctx<'_> {
    fn search(&self, mut st: State) -> Option<State> {
        self.propagate(&mut st)?;
        // Branch on the most constrained unordered group.
        let mut best: Option<(usize, FlagId, Vec<FlagId>)> = None;
        for (ga, gb) in &st.groups {
            let Some(&fa) = ga.iter().find(|f| st.fmap[**f].is_none()) else { continue };
            let ty = &self.a.graph.flags[fa].ty;
            let cands: Vec<FlagId> =
                gb.iter().copied().filter(|&g| st.finv[g].is_none() && &self.b.graph.flags[g].ty == ty).collect();
            if best.as_ref().is_none_or(|(n, _, _)| cands.len() < *n) {
                best = Some((cands.len(), fa, cands));
            }
        }
        if let Some((_, fa, cands)) = best {
            for fb in cands {
                let mut next = st.clone();
                next.queue.push(Pair::Flag(fa, fb));
                if let Some(done) = self.search(next) {
                    return Some(done);
                }
            }
            return None;
        }
        if let Some(va) = st.vmap.iter().position(Option::is_none) {
            let la = &self.a.graph.vertices[va];
            for vb in 0..self.b.graph.vertices.len() {
                let lb = &self.b.graph.vertices[vb];
                if st.vinv[vb].is_some() || la.label != lb.label || la.inputs.len() != lb.inputs.len() || la.outputs.len() != lb.outputs.len() {
                    continue;
                }
                let mut next = st.clone();
                next.queue.push(Pair::Vertex(va, vb));
                if let Some(done) = self.search(next) {
                    return Some(done);
                }
            }
            return None;
        }
        // Cell-free nodes: shallowest first so parents are already placed.
        let pending = (0..self.a.forest.len()).filter(|&n| st.nmap[n].is_none()).min_by_key(|&n| self.depth_a[n]);
        if let Some(na) = pending {
            for nb in 0..self.b.forest.len() {
                if st.ninv[nb].is_some() || self.depth_a[na] != self.depth_b[nb] {
                    continue;
                }
                let mut next = st.clone();
                next.queue.push(Pair::Node(na, nb));
                if let Some(done) = self.search(next) {
                    return Some(done);
                }
            }
            return None;
        }
        Some(st)
    }

    fn propagate(&self, st: &mut State) -> Option<()> {
        loop {
            while let Some(p) = st.queue.pop() {
                match p {
                    Pair::Flag(a, b) => self.flag(st, a, b)?,
                    Pair::Vertex(a, b) => self.vertex(st, a, b)?,
                    Pair::Node(a, b) => self.node(st, a, b)?,
                }
            }
            if !self.settle_groups(st)? {
                return Some(());
            }
        }
    }

    /// Force the group members that have a unique candidate; true if anything
    /// was queued.
    fn settle_groups(&self, st: &mut State) -> Option<bool> {
        let mut progress = false;
        let mut keep = vec![];
        for (ga, gb) in std::mem::take(&mut st.groups) {
            let open_a: Vec<FlagId> = ga.iter().copied().filter(|f| st.fmap[*f].is_none()).collect();
            let open_b: Vec<FlagId> = gb.iter().copied().filter(|f| st.finv[*f].is_none()).collect();
            if open_a.len() != open_b.len() {
                return None;
            }
            if open_a.is_empty() {
                continue;
            }
            let mut ta: Vec<_> = open_a.iter().map(|&f| &self.a.graph.flags[f].ty).collect();
            let mut tb: Vec<_> = open_b.iter().map(|&f| &self.b.graph.flags[f].ty).collect();
            ta.sort();
            tb.sort();
            if ta != tb {
                return None;
            }
            let mut forced = false;
            for &fa in &open_a {
                let ty = &self.a.graph.flags[fa].ty;
                let same_a = open_a.iter().filter(|&&f| &self.a.graph.flags[f].ty == ty).count();
                if same_a == 1 {
                    let fb = *open_b.iter().find(|&&f| &self.b.graph.flags[f].ty == ty)?;
                    st.queue.push(Pair::Flag(fa, fb));
                    forced = true;
                }
            }
            if forced {
                progress = true;
            }
            keep.push((ga, gb));
        }
        st.groups = keep;
        Some(progress)
    }

    fn flag(&self, st: &mut State, a: FlagId, b: FlagId) -> Option<()> {
        match (st.fmap[a], st.finv[b]) {
            (Some(x), _) if x == b => return Some(()),
            (None, None) => {}
            _ => return None,
        }
        let (fa, fb) = (&self.a.graph.flags[a], &self.b.graph.flags[b]);
        if fa.ty != fb.ty || fa.orient != fb.orient {
            return None;
        }
        st.fmap[a] = Some(b);
        st.finv[b] = Some(a);
        match (fa.partner, fb.partner) {
            (Some(pa), Some(pb)) => st.queue.push(Pair::Flag(pa, pb)),
            (None, None) => {}
            _ => return None,
        }
        st.queue.push(Pair::Vertex(fa.vertex, fb.vertex));
        Some(())
    }

    fn vertex(&self, st: &mut State, a: VertexId, b: VertexId) -> Option<()> {
        match (st.vmap[a], st.vinv[b]) {
            (Some(x), _) if x == b => return Some(()),
            (None, None) => {}
            _ => return None,
        }
        let (va, vb) = (&self.a.graph.vertices[a], &self.b.graph.vertices[b]);
        if va.label != vb.label || va.inputs.len() != vb.inputs.len() || va.outputs.len() != vb.outputs.len() {
            return None;
        }
        st.vmap[a] = Some(b);
        st.vinv[b] = Some(a);
        st.queue.push(Pair::Node(self.a.boxes[a], self.b.boxes[b]));
        let positional_inputs = matches!(va.label, Label::Tensor | Label::Par)
            || (self.mode == IsoMode::Rigid && va.label.is_exponential());
        if positional_inputs {
            for (&x, &y) in va.inputs.iter().zip(&vb.inputs) {
                st.queue.push(Pair::Flag(x, y));
            }
        } else if !va.inputs.is_empty() {
            st.groups.push((va.inputs.clone(), vb.inputs.clone()));
        }
        if va.outputs.len() == 1 {
            st.queue.push(Pair::Flag(va.outputs[0], vb.outputs[0]));
        } else if !va.outputs.is_empty() {
            st.groups.push((va.outputs.clone(), vb.outputs.clone()));
        }
        Some(())
    }

    fn node(&self, st: &mut State, a: NodeId, b: NodeId) -> Option<()> {
        match (st.nmap[a], st.ninv[b]) {
            (Some(x), _) if x == b => return Some(()),
            (None, None) => {}
            _ => return None,
        }
        if self.depth_a[a] != self.depth_b[b] {
            return None;
        }
        st.nmap[a] = Some(b);
        st.ninv[b] = Some(a);
        match (self.a.forest.parent[a], self.b.forest.parent[b]) {
            (Some(pa), Some(pb)) => st.queue.push(Pair::Node(pa, pb)),
            (None, None) => {}
            _ => return None,
        }
        Some(())
    }
}

fn h<T: Hash>(x: &T) -> u64 {
    let mut s = DefaultHasher::new();
    x.hash(&mut s);
    s.finish()
}

/// Color-refinement hash, invariant under standard-mode isomorphism.
pub fn invariant_hash(v: IsoView<'_>) -> u64 {
    let g = v.graph;
    let f = v.forest;
    let mut tail_pos = vec![usize::MAX; g.flags.len()];
    for (k, &t) in g.tails.iter().enumerate() {
        tail_pos[t] = k;
    }
    let kids = f.children_table();
    let mut ncol: Vec<u64> = (0..f.len()).map(|n| h(&(f.depth(n), kids[n].len()))).collect();
    let mut vcol: Vec<u64> = g
        .vertices
        .iter()
        .map(|vx| {
            let mut outs: Vec<_> = vx.outputs.iter().map(|&o| (&g.flags[o].ty, tail_pos[o])).collect();
            outs.sort();
            let ins: Vec<_> = vx.inputs.iter().map(|&i| &g.flags[i].ty).collect();
            h(&(vx.label, outs, ins.len()))
        })
        .collect();
    for _ in 0..4 {
        let next_v: Vec<u64> = g
            .vertices
            .iter()
            .enumerate()
            .map(|(i, vx)| {
                let mut ins: Vec<u64> = vx.inputs.iter().map(|&x| g.neighbor(x).map_or(0, |n| vcol[n])).collect();
                if !matches!(vx.label, Label::Tensor | Label::Par) {
                    ins.sort_unstable();
                }
                let mut outs: Vec<(u64, usize)> =
                    vx.outputs.iter().map(|&x| (g.neighbor(x).map_or(0, |n| vcol[n]), tail_pos[x])).collect();
                outs.sort_unstable();
                h(&(vcol[i], ncol[v.boxes[i]], ins, outs))
            })
            .collect();
        let mut members: Vec<Vec<u64>> = vec![vec![]; f.len()];
        for (i, &b) in v.boxes.iter().enumerate() {
            members[b].push(vcol[i]);
        }
        let next_n: Vec<u64> = (0..f.len())
            .map(|n| {
                members[n].sort_unstable();
                let mut ch: Vec<u64> = kids[n].iter().map(|&c| ncol[c]).collect();
                ch.sort_unstable();
                h(&(ncol[n], &members[n], f.parent[n].map_or(0, |p| ncol[p]), ch))
            })
            .collect();
        vcol = next_v;
        ncol = next_n;
    }
    vcol.sort_unstable();
    ncol.sort_unstable();
    h(&(vcol, ncol, g.tails.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Formula;
    use crate::graph::{build_graph, Corolla};

    fn corolla(label: Label, inputs: &[&str], outputs: &[&str]) -> Corolla {
        Corolla {
            label,
            inputs: inputs.iter().map(|s| s.parse().unwrap()).collect(),
            outputs: outputs.iter().map(|s| s.parse().unwrap()).collect(),
        }
    }

    /// `?bot` fed by a `1`-side and a `bot`-side: (1 ax bot) is impossible, so
    /// use two bot cells of different origin: a plain `bot` and an axiom half.
    fn why_not_pair(swap: bool) -> StructuredGraph {
        let cs = vec![
            corolla(Label::Bot, &[], &["bot"]),
            corolla(Label::Ax, &[], &["bot", "1"]),
            corolla(Label::WhyNot, &["bot", "bot"], &["?bot"]),
        ];
        let gl = if swap { [((0, 0), (2, 1)), ((1, 0), (2, 0))] } else { [((0, 0), (2, 0)), ((1, 0), (2, 1))] };
        let mut g = build_graph(&cs, &gl).unwrap();
        // Conclusions: ?bot then the axiom's 1.
        g.tails.sort_by_key(|&t| g.flags[t].ty != "?bot".parse::<Formula>().unwrap());
        g
    }

    fn view<'a>(g: &'a StructuredGraph, f: &'a RootedForest, b: &'a [NodeId]) -> IsoView<'a> {
        IsoView { graph: g, forest: f, boxes: b }
    }

    /// Exhaustive oracle: try every vertex bijection and check labels,
    /// positional edge structure up to the mode, and tail order.
    fn brute_force(a: &StructuredGraph, b: &StructuredGraph, mode: IsoMode) -> bool {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = vec![];
            for p in perms(n - 1) {
                for i in 0..n {
                    let mut q = p.clone();
                    q.insert(i, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let sig = |g: &StructuredGraph, vmap: &[usize]| {
            // Each input slot described by (mapped vertex, slot) and its source vertex.
            let mut edges = vec![];
            for (v, vx) in g.vertices.iter().enumerate() {
                for (k, &i) in vx.inputs.iter().enumerate() {
                    let src = g.neighbor(i).map(|s| vmap[s]);
                    let ordered = matches!(vx.label, Label::Tensor | Label::Par) || (mode == IsoMode::Rigid && vx.label.is_exponential());
                    edges.push((vmap[v], if ordered { k } else { 0 }, src, g.flags[i].ty.clone()));
                }
            }
            edges.sort();
            let tails: Vec<_> = g.tails.iter().map(|&t| (vmap[g.flags[t].vertex], g.flags[t].ty.clone())).collect();
            (edges, tails)
        };
        if a.vertices.len() != b.vertices.len() {
            return false;
        }
        let id: Vec<usize> = (0..b.vertices.len()).collect();
        let target = sig(b, &id);
        perms(a.vertices.len()).into_iter().any(|p| {
            (0..a.vertices.len()).all(|v| a.vertices[v].label == b.vertices[p[v]].label) && sig(a, &p) == target
        })
    }

    #[test]
    fn whynot_input_order_matters_only_in_rigid_mode() {
        let (a, b) = (why_not_pair(false), why_not_pair(true));
        let f = RootedForest::roots_only(1);
        let boxes = vec![0; 3];
        assert!(find_isomorphism(view(&a, &f, &boxes), view(&b, &f, &boxes), IsoMode::Standard).is_some());
        assert!(find_isomorphism(view(&a, &f, &boxes), view(&b, &f, &boxes), IsoMode::Rigid).is_none());
        assert!(brute_force(&a, &b, IsoMode::Standard));
        assert!(!brute_force(&a, &b, IsoMode::Rigid));
        assert_eq!(invariant_hash(view(&a, &f, &boxes)), invariant_hash(view(&b, &f, &boxes)));
    }

    #[test]
    fn renamed_ids_are_isomorphic() {
        let a = why_not_pair(false);
        // Reverse vertex order by rebuilding from reversed corollas.
        let cs = vec![
            corolla(Label::WhyNot, &["bot", "bot"], &["?bot"]),
            corolla(Label::Ax, &[], &["bot", "1"]),
            corolla(Label::Bot, &[], &["bot"]),
        ];
        let mut b = build_graph(&cs, &[((2, 0), (0, 0)), ((1, 0), (0, 1))]).unwrap();
        b.tails.sort_by_key(|&t| b.flags[t].ty != "?bot".parse::<Formula>().unwrap());
        let f = RootedForest::roots_only(1);
        let boxes = vec![0; 3];
        let iso = find_isomorphism(view(&a, &f, &boxes), view(&b, &f, &boxes), IsoMode::Rigid).unwrap();
        assert_eq!(iso.vertex_map, vec![2, 1, 0]);
    }

    #[test]
    fn tensor_operands_do_not_commute() {
        let a = build_graph(
            &[corolla(Label::Ax, &[], &["X", "X^"]), corolla(Label::Ax, &[], &["Y", "Y^"]), corolla(Label::Tensor, &["X", "Y"], &["(X*Y)"])],
            &[((0, 0), (2, 0)), ((1, 0), (2, 1))],
        )
        .unwrap();
        let b = build_graph(
            &[corolla(Label::Ax, &[], &["X", "X^"]), corolla(Label::Ax, &[], &["Y", "Y^"]), corolla(Label::Tensor, &["Y", "X"], &["(Y*X)"])],
            &[((0, 0), (2, 1)), ((1, 0), (2, 0))],
        )
        .unwrap();
        let f = RootedForest::roots_only(1);
        let boxes = vec![0; 3];
        for mode in [IsoMode::Rigid, IsoMode::Standard] {
            assert!(find_isomorphism(view(&a, &f, &boxes), view(&b, &f, &boxes), mode).is_none());
        }
    }

    #[test]
    fn closed_components_and_empty_nodes() {
        let cs = vec![corolla(Label::Ax, &[], &["X", "X^"]), corolla(Label::Cut, &["X", "X^"], &[])];
        let a = build_graph(&cs, &[((0, 0), (1, 0)), ((0, 1), (1, 1))]).unwrap();
        let cs2 = vec![corolla(Label::Cut, &["X^", "X"], &[]), corolla(Label::Ax, &[], &["X^", "X"])];
        let b = build_graph(&cs2, &[((1, 0), (0, 0)), ((1, 1), (0, 1))]).unwrap();
        // Forest: root with one empty child; the loop lives in the root.
        let f = RootedForest { parent: vec![None, Some(0)] };
        let g = RootedForest { parent: vec![Some(1), None] };
        let iso = find_isomorphism(view(&a, &f, &[0, 0]), view(&b, &g, &[1, 1]), IsoMode::Rigid).unwrap();
        assert_eq!(iso.node_map, vec![1, 0]);
        assert_eq!(iso.vertex_map, vec![1, 0]);
        assert!(find_isomorphism(view(&a, &f, &[0, 0]), view(&b, &g, &[0, 0]), IsoMode::Rigid).is_none());
    }
}
