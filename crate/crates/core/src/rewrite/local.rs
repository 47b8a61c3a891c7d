//! Shared helpers: locating blocks, lone cells, pieces of a root and the
//! block split used by mix.

use crate::graph::{FlagId, Label, NodeId, UnionFind, VertexId};
use crate::structure::{is_iso, Draft, Qps};

/// The root holding conclusion `i` and its conclusions, with the 1-based
/// position of the first one.
pub(crate) struct BlockAt {
    pub root: NodeId,
    pub tails: Vec<FlagId>,
    pub start: usize,
}

impl BlockAt {
    pub fn end(&self) -> usize {
        self.start + self.tails.len() - 1
    }

    pub fn positions(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end()
    }
}

pub(crate) fn block_at(q: &Qps, i: usize) -> Option<BlockAt> {
    let t = q.conclusion(i)?;
    let root = q.root_of_vertex(q.vertex_of(t));
    let tails: Vec<FlagId> = q.blocks().into_iter().find(|(r, _)| *r == root)?.1;
    let start = q.position(tails[0])?;
    Some(BlockAt { root, tails, start })
}

/// The only vertex of the tree of `root`, if the tree has one node and one vertex.
pub(crate) fn lone_vertex(q: &Qps, root: NodeId) -> Option<VertexId> {
    if !q.forest.children(root).is_empty() {
        return None;
    }
    match q.vertices_under(root).as_slice() {
        [v] => Some(*v),
        _ => None,
    }
}

/// Remove the whole tree of `root`, its vertices and its conclusions.
pub(crate) fn remove_root(q: &Qps, root: NodeId) -> Qps {
    let mut d = Draft::new(q.clone());
    for v in q.vertices_under(root) {
        d.remove_vertex(v);
    }
    for n in q.forest.subtree(root) {
        d.remove_node(n);
    }
    let tails = q.conclusions().iter().copied().filter(|&t| q.root_of_vertex(q.vertex_of(t)) != root).collect();
    d.set_tails(tails);
    d.finish()
}

/// Replace `remove` tails starting at the 0-based index `at` by `new`.
pub(crate) fn splice_tails(tails: &mut Vec<FlagId>, at: usize, remove: usize, new: &[FlagId]) {
    tails.splice(at..at + remove, new.iter().copied());
}

/// The output flag glued to input `f`.
pub(crate) fn partner(q: &Qps, f: FlagId) -> FlagId {
    q.graph.flags[f].partner.expect("inputs of a valid structure are glued")
}

/// Connected pieces of the vertices of `root`'s tree outside `exclude`.
/// Everything inside one box of the root counts as connected.
pub(crate) fn pieces(q: &Qps, root: NodeId, exclude: &[VertexId]) -> Vec<Vec<VertexId>> {
    let vs: Vec<VertexId> = q.vertices_under(root).into_iter().filter(|v| !exclude.contains(v)).collect();
    let idx = |v: VertexId| vs.iter().position(|&x| x == v);
    let mut uf = UnionFind::new(vs.len());
    let mut box_rep: Vec<Option<usize>> = vec![None; q.forest.len()];
    for (k, &v) in vs.iter().enumerate() {
        for &o in &q.graph.vertices[v].outputs {
            if let Some(w) = q.graph.flags[o].partner.map(|p| q.vertex_of(p)).and_then(idx) {
                uf.union(k, w);
            }
        }
        let b = q.boxes[v];
        if b != root {
            let top = top_child(q, root, b);
            match box_rep[top] {
                Some(x) => {
                    uf.union(x, k);
                }
                None => box_rep[top] = Some(k),
            }
        }
    }
    let (labels, count) = uf.labels();
    let mut out: Vec<Vec<VertexId>> = vec![vec![]; count];
    for (k, &v) in vs.iter().enumerate() {
        out[labels[k]].push(v);
    }
    out.retain(|p| !p.is_empty());
    out
}

/// The child of `root` on the way to `n`.
pub(crate) fn top_child(q: &Qps, root: NodeId, mut n: NodeId) -> NodeId {
    while q.forest.parent[n] != Some(root) {
        n = q.forest.parent[n].expect("node below root");
    }
    n
}

/// Split the block of conclusion `i` after `i` into two roots. Pieces without
/// conclusions may go either way; every assignment is returned.
pub(crate) fn split_mix(q: &Qps, i: usize) -> Vec<Qps> {
    let Some(b) = block_at(q, i) else { return vec![] };
    if i >= b.end() {
        return vec![];
    }
    let ps = pieces(q, b.root, &[]);
    let side = |v: VertexId| -> Vec<bool> {
        q.graph.vertices[v]
            .outputs
            .iter()
            .filter_map(|&o| q.position(o))
            .map(|p| p > i)
            .collect()
    };
    let mut fixed: Vec<Option<bool>> = vec![];
    for p in &ps {
        let sides: Vec<bool> = p.iter().flat_map(|&v| side(v)).collect();
        if sides.iter().any(|&s| s) && sides.iter().any(|&s| !s) {
            return vec![];
        }
        fixed.push(sides.first().copied());
    }
    let floating: Vec<usize> = (0..ps.len()).filter(|&k| fixed[k].is_none()).collect();
    let mut out = vec![];
    for mask in 0u64..(1 << floating.len()) {
        let mut right = fixed.clone();
        for (bit, &k) in floating.iter().enumerate() {
            right[k] = Some(mask >> bit & 1 == 1);
        }
        let mut d = Draft::new(q.clone());
        let r2 = d.add_node(None);
        for (k, p) in ps.iter().enumerate() {
            if right[k] != Some(true) {
                continue;
            }
            for &v in p {
                if q.boxes[v] == b.root {
                    d.set_box(v, r2);
                } else {
                    d.set_parent(top_child(q, b.root, q.boxes[v]), Some(r2));
                }
            }
        }
        out.push(d.finish());
    }
    out
}

/// Merge the root of conclusion `i + 1` into the root of conclusion `i`.
pub(crate) fn merge_roots(q: &Qps, i: usize) -> Option<Qps> {
    let r1 = q.root_of_vertex(q.vertex_of(q.conclusion(i)?));
    let r2 = q.root_of_vertex(q.vertex_of(q.conclusion(i + 1)?));
    if r1 == r2 {
        return None;
    }
    let mut d = Draft::new(q.clone());
    for v in q.vertices_in(r2) {
        d.set_box(v, r1);
    }
    for c in q.forest.children(r2) {
        d.set_parent(c, Some(r1));
    }
    d.remove_node(r2);
    Some(d.finish())
}

/// Keep one representative per isomorphism class, in first-seen order.
pub(crate) fn dedupe(qs: Vec<Qps>) -> Vec<Qps> {
    let mut out: Vec<(u64, Qps)> = vec![];
    for q in qs {
        let h = q.invariant_hash();
        if !out.iter().any(|(h2, x)| *h2 == h && is_iso(x, &q)) {
            out.push((h, q));
        }
    }
    out.into_iter().map(|(_, q)| q).collect()
}

/// Both lists hold the same isomorphism classes (each list already deduplicated).
pub(crate) fn same_classes(a: &[Qps], b: &[Qps]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.iter().any(|y| is_iso(x, y)))
}

/// A set of structures up to isomorphism, sorted by invariant hash, with
/// the hashes kept alongside.
#[derive(Clone, Debug, Default)]
pub(crate) struct HashedSet {
    pub hashes: Vec<u64>,
    pub items: Vec<Qps>,
}

impl HashedSet {
    pub fn new(items: impl IntoIterator<Item = Qps>) -> HashedSet {
        HashedSet::from_hashed(items.into_iter().map(|q| (q.invariant_hash(), q)))
    }

    pub fn from_hashed(items: impl IntoIterator<Item = (u64, Qps)>) -> HashedSet {
        let mut out: Vec<(u64, Qps)> = vec![];
        for (h, q) in items {
            if !out.iter().any(|(h2, x)| *h2 == h && is_iso(x, &q)) {
                out.push((h, q));
            }
        }
        out.sort_by_key(|(h, _)| *h);
        let (hashes, items) = out.into_iter().unzip();
        HashedSet { hashes, items }
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u64, &Qps)> {
        self.hashes.iter().copied().zip(&self.items)
    }

    pub fn same(&self, other: &HashedSet) -> bool {
        self.hashes == other.hashes
            && self.pairs().all(|(h, x)| other.pairs().any(|(h2, y)| h == h2 && is_iso(x, y)))
    }
}

pub(crate) fn is_why_not(q: &Qps, v: VertexId) -> bool {
    q.label(v) == Label::WhyNot
}
