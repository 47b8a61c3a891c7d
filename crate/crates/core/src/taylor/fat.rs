//! Emptying relative to an upward-closed set of boxes, S-fat subforests,
//! fattened elements and their stripping back to Taylor elements.
//!
//! A set S of box nodes is upward-closed when it contains every child of its
//! members. Its boundary holds the members whose parent is outside S; its
//! interior is the rest. Emptying removes the interior nodes, removes every
//! cell living in S, and puts in each boundary node one daimon with an
//! output for every edge that left the subtree of that node.

use std::collections::BTreeSet;
use std::rc::Rc;

use thiserror::Error;

use crate::graph::{FlagId, Label, NodeId, RootedForest};
use crate::structure::{Draft, Qps};

use super::thick::{subforest_of, Shape};
use super::{enumerate_thick_subforests, expand, TaylorElement, ThickSubforest};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FatError {
    #[error("node {child} is a child of {node} in S but is not in S")]
    NotUpwardClosed { node: NodeId, child: NodeId },
    #[error("conclusion {position} is not the output of a `?`-cell")]
    BadDoor { position: usize },
    #[error("doors are only allowed when the root is in S")]
    DoorsWithoutRoot,
    #[error("expected a single-root structure, found {roots} roots")]
    NotSingleRoot { roots: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UpwardClosedSet {
    pub nodes: BTreeSet<NodeId>,
}

impl UpwardClosedSet {
    pub fn new(f: &RootedForest, nodes: impl IntoIterator<Item = NodeId>) -> Result<UpwardClosedSet, FatError> {
        let nodes: BTreeSet<NodeId> = nodes.into_iter().collect();
        for &n in &nodes {
            if let Some(child) = f.children(n).into_iter().find(|c| !nodes.contains(c)) {
                return Err(FatError::NotUpwardClosed { node: n, child });
            }
        }
        Ok(UpwardClosedSet { nodes })
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.nodes.contains(&n)
    }

    /// Members whose parent is not a member.
    pub fn boundary(&self, f: &RootedForest) -> Vec<NodeId> {
        self.nodes.iter().copied().filter(|&n| f.parent[n].is_none_or(|p| !self.contains(p))).collect()
    }

    /// Members with another member below them.
    pub fn interior(&self, f: &RootedForest) -> Vec<NodeId> {
        self.nodes.iter().copied().filter(|&n| f.parent[n].is_some_and(|p| self.contains(p))).collect()
    }

    /// Every upward-closed subset of the tree at `root`, the empty set first.
    pub fn all_in_tree(f: &RootedForest, root: NodeId) -> Vec<UpwardClosedSet> {
        let kids = f.children_table();
        fn go(f: &RootedForest, kids: &[Vec<NodeId>], n: NodeId) -> Vec<BTreeSet<NodeId>> {
            let mut acc = vec![BTreeSet::new()];
            for &c in &kids[n] {
                let sub = go(f, kids, c);
                acc = acc.iter().flat_map(|a| sub.iter().map(move |s| a.union(s).copied().collect())).collect();
            }
            acc.push(f.subtree(n).into_iter().collect());
            acc
        }
        let mut sets = go(f, &kids, root);
        sets.sort_by_key(|s| (s.len(), s.iter().copied().collect::<Vec<_>>()));
        sets.into_iter().map(|nodes| UpwardClosedSet { nodes }).collect()
    }
}

/// The emptied structure with its collapsed forest: `node_map` sends each
/// original node to its new id (interior nodes have none) and `boundary`
/// lists the new ids of the boundary nodes.
#[derive(Clone, Debug)]
pub struct Emptied {
    pub structure: Qps,
    pub node_map: Vec<Option<NodeId>>,
    pub boundary: Vec<NodeId>,
}

/// Empty the single-root structure `rc` relative to `s`. When the root is in
/// `s`, `doors` lists the 1-based positions of `?`-conclusions kept as cells.
pub fn emptying_wrt(rc: &Qps, s: &UpwardClosedSet, doors: &[usize]) -> Result<Emptied, FatError> {
    let roots = rc.forest.roots();
    let [root] = roots.as_slice() else { return Err(FatError::NotSingleRoot { roots: roots.len() }) };
    let root = *root;
    UpwardClosedSet::new(&rc.forest, s.nodes.iter().copied())?;
    if !s.contains(root) && !doors.is_empty() {
        return Err(FatError::DoorsWithoutRoot);
    }
    for &i in doors {
        let ok = rc.conclusion(i).is_some_and(|t| rc.label(rc.vertex_of(t)) == Label::WhyNot);
        if !ok {
            return Err(FatError::BadDoor { position: i });
        }
    }

    let mut d = Draft::new(rc.clone());
    if s.contains(root) {
        for v in 0..rc.graph.vertices.len() {
            d.remove_vertex(v);
        }
        for n in 0..rc.forest.len() {
            if n != root {
                d.remove_node(n);
            }
        }
        let dai = d.add_vertex(Label::Daimon, root, &[], &[]);
        let mut tails = vec![];
        for (k, &t) in rc.conclusions().iter().enumerate() {
            let ty = rc.ty(t).clone();
            if doors.contains(&(k + 1)) {
                let door = rc.vertex_of(t);
                let body = ty.why_not_body().expect("door has a ? type").clone();
                let w = d.add_vertex(Label::WhyNot, root, &[], &[ty]);
                for _ in 0..rc.graph.vertices[door].inputs.len() {
                    let o = d.add_output(dai, body.clone());
                    let i = d.add_input(w, body.clone());
                    d.glue(o, i);
                }
                tails.push(d.q.graph.vertices[w].outputs[0]);
            } else {
                tails.push(d.add_output(dai, ty));
            }
        }
        d.set_tails(tails);
        let mut node_map = vec![None; rc.forest.len()];
        node_map[root] = Some(0);
        return Ok(Emptied { structure: d.finish(), node_map, boundary: vec![0] });
    }

    let boundary = s.boundary(&rc.forest);
    let interior = s.interior(&rc.forest);
    // Edges leaving the subtree of each boundary node, in target order.
    let mut crossing: Vec<Vec<FlagId>> = vec![vec![]; boundary.len()];
    for (v, vx) in rc.graph.vertices.iter().enumerate() {
        if s.contains(rc.boxes[v]) {
            continue;
        }
        for &i in &vx.inputs {
            let Some(src) = rc.source(i) else { continue };
            let sb = rc.boxes[src];
            if let Some(k) = boundary.iter().position(|&b| rc.forest.is_ancestor_or_self(b, sb)) {
                crossing[k].push(i);
            }
        }
    }
    for v in 0..rc.graph.vertices.len() {
        if s.contains(rc.boxes[v]) {
            d.remove_vertex(v);
        }
    }
    for &n in &interior {
        d.remove_node(n);
    }
    for (k, &b) in boundary.iter().enumerate() {
        let dai = d.add_vertex(Label::Daimon, b, &[], &[]);
        for &i in &crossing[k] {
            let o = d.add_output(dai, rc.ty(i).clone());
            d.glue(o, i);
        }
    }
    let mut node_map = vec![None; rc.forest.len()];
    let mut next = 0;
    for (n, slot) in node_map.iter_mut().enumerate() {
        if !interior.contains(&n) {
            *slot = Some(next);
            next += 1;
        }
    }
    let boundary_new = boundary.iter().map(|&b| node_map[b].expect("boundary kept")).collect();
    Ok(Emptied { structure: d.finish(), node_map, boundary: boundary_new })
}

/// Surjective off the boundary; a boundary root has one preimage, any other
/// boundary node as many preimages as its parent.
pub fn is_s_fat(t: &ThickSubforest, f: &RootedForest, boundary: &[NodeId]) -> bool {
    let c = t.counts(f.len());
    (0..f.len()).all(|n| match (boundary.contains(&n), f.parent[n]) {
        (false, _) => c[n] >= 1,
        (true, None) => c[n] == 1,
        (true, Some(p)) => c[n] == c[p],
    })
}

/// A fattened element of one component, with its provenance.
#[derive(Clone, Debug)]
pub struct FatPart {
    pub s: UpwardClosedSet,
    pub doors: Vec<usize>,
    pub emptied: Emptied,
    pub element: TaylorElement,
}

/// Fattened elements of the single-root `rc` with at most `bound` copies per
/// parent copy: over every upward-closed S (with every door choice when the
/// root is in S) and every S-fat subforest of the emptied forest.
pub fn fattened_component_members(rc: &Qps, bound: usize) -> Vec<FatPart> {
    let root = rc.forest.roots()[0];
    let why_nots: Vec<usize> = (1..=rc.conclusions().len())
        .filter(|&i| rc.label(rc.vertex_of(rc.conclusion(i).expect("in range"))) == Label::WhyNot)
        .collect();
    let mut out = vec![];
    for s in UpwardClosedSet::all_in_tree(&rc.forest, root) {
        let door_choices: Vec<Vec<usize>> = if s.contains(root) {
            (0u64..(1 << why_nots.len()))
                .map(|m| (0..why_nots.len()).filter(|k| m >> k & 1 == 1).map(|k| why_nots[k]).collect())
                .collect()
        } else {
            vec![vec![]]
        };
        for doors in door_choices {
            let emptied = emptying_wrt(rc, &s, &doors).expect("enumerated sets are upward-closed");
            let ef = &emptied.structure.forest;
            for t in enumerate_thick_subforests(ef, bound).filter(|t| is_s_fat(t, ef, &emptied.boundary)) {
                let element = expand(&emptied.structure, &t);
                out.push(FatPart { s: s.clone(), doors: doors.clone(), emptied: emptied.clone(), element });
            }
        }
    }
    out
}

/// Drop the boundary copies from a fattened element's subforest and expand
/// the original component along what is left. When the whole tree is in S
/// only the root copy is kept.
pub fn strip_component(rc: &Qps, part: &FatPart) -> TaylorElement {
    let root = rc.forest.roots()[0];
    if part.s.contains(root) {
        return expand(rc, &ThickSubforest::roots_of(&rc.forest));
    }
    let back: Vec<NodeId> = {
        let mut b = vec![usize::MAX; part.emptied.structure.forest.len()];
        for (n, m) in part.emptied.node_map.iter().enumerate() {
            if let Some(m) = m {
                b[*m] = n;
            }
        }
        b
    };
    let t = &part.element.subforest;
    let mut sigma = RootedForest::new();
    let mut h = vec![];
    let mut new_id = vec![None; t.sigma.len()];
    for x in t.sigma.preorder() {
        if part.emptied.boundary.contains(&t.h[x]) {
            continue;
        }
        new_id[x] = Some(sigma.add(t.sigma.parent[x].and_then(|p| new_id[p])));
        h.push(back[t.h[x]]);
    }
    expand(rc, &ThickSubforest { sigma, h })
}

/// A fattened element of a whole structure, one part per root in root order.
#[derive(Clone, Debug)]
pub struct FatElement {
    pub structure: Qps,
    pub parts: Vec<FatPart>,
}

/// Combine per-component parts of `r` (in root order) into one element,
/// juxtaposed in the order of the blocks of `r`.
pub fn assemble(r: &Qps, parts: Vec<FatPart>) -> FatElement {
    let roots = r.forest.roots();
    debug_assert_eq!(parts.len(), roots.len());
    let structure = r.blocks().into_iter().fold(Qps::empty(r.mode), |acc, (root, _)| {
        let k = roots.iter().position(|&x| x == root).expect("block of a root");
        acc.juxtapose(&parts[k].element.structure)
    });
    FatElement { structure, parts }
}

/// Every fattened element of `r` at the given bound: the product of the
/// component streams. Intended for small structures.
pub fn fattened_members(r: &Qps, bound: usize) -> Vec<FatElement> {
    let per: Vec<Vec<FatPart>> =
        r.forest.roots().into_iter().map(|n| fattened_component_members(&r.component(n), bound)).collect();
    let total: usize = per.iter().map(Vec::len).product();
    (0..total)
        .map(|mut idx| {
            let parts = per
                .iter()
                .map(|l| {
                    let p = l[idx % l.len()].clone();
                    idx /= l.len();
                    p
                })
                .collect();
            assemble(r, parts)
        })
        .collect()
}

/// The Taylor element of `r` a fattened element strips back to.
pub fn strip_to_taylor(r: &Qps, fat: &FatElement) -> TaylorElement {
    let roots = r.forest.roots();
    let mut shapes: Vec<Rc<Shape>> = vec![];
    for (k, &rt) in roots.iter().enumerate() {
        let rc = r.component(rt);
        let kept: Vec<NodeId> = (0..r.forest.len()).filter(|&n| r.forest.root_of(n) == rt).collect();
        let part_t = strip_component(&rc, &fat.parts[k]).subforest;
        shapes.push(shape_of(&part_t, &kept));
    }
    expand(r, &subforest_of(&shapes))
}

/// The single-root subforest `t` as a shape, relabelled through `ids`.
fn shape_of(t: &ThickSubforest, ids: &[NodeId]) -> Rc<Shape> {
    let kids = t.sigma.children_table();
    fn go(t: &ThickSubforest, kids: &[Vec<NodeId>], ids: &[NodeId], x: NodeId) -> Rc<Shape> {
        Rc::new(Shape { node: ids[t.h[x]], kids: kids[x].iter().map(|&c| go(t, kids, ids, c)).collect() })
    }
    go(t, &kids, ids, t.sigma.roots()[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::structure::{is_iso, validate_classify, AxiomMode, Builder};
    use crate::taylor::is_taylor_member;

    fn boxed_bot() -> Qps {
        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let bx = b.child(r);
        let bot = b.cell(Label::Bot, bx, &[], &["bot"]);
        let oc = b.cell(Label::OfCourse, r, &[], &["!bot"]);
        b.feed(bot, 0, oc);
        b.conclude(&[b.out(oc, 0)]);
        b.finish()
    }

    #[test]
    fn upward_closed_sets() {
        let f = RootedForest { parent: vec![None, Some(0), Some(1), Some(0)] };
        assert!(UpwardClosedSet::new(&f, [1]).is_err());
        let s = UpwardClosedSet::new(&f, [1, 2, 3]).unwrap();
        assert_eq!(s.boundary(&f), vec![1, 3]);
        assert_eq!(s.interior(&f), vec![2]);
        // Oracle: brute force over all 16 subsets.
        let brute = (0u32..16)
            .filter(|m| (0..4).all(|n| m >> n & 1 == 0 || f.children(n).iter().all(|&c| m >> c & 1 == 1)))
            .count();
        assert_eq!(UpwardClosedSet::all_in_tree(&f, 0).len(), brute);
    }

    #[test]
    fn empty_set_changes_nothing() {
        let rc = fixtures::two_root_boxes().component(0);
        let e = emptying_wrt(&rc, &UpwardClosedSet::new(&rc.forest, []).unwrap(), &[]).unwrap();
        assert!(is_iso(&e.structure, &rc));
        let ef = &e.structure.forest;
        for t in enumerate_thick_subforests(ef, 2) {
            assert_eq!(is_s_fat(&t, ef, &e.boundary), t.counts(ef.len()).iter().all(|&c| c >= 1));
        }
    }

    #[test]
    fn whole_tree_reduces_to_root() {
        let rc = boxed_bot();
        let s = UpwardClosedSet::new(&rc.forest, [0, 1]).unwrap();
        let e = emptying_wrt(&rc, &s, &[]).unwrap();
        assert_eq!(e.structure.forest.len(), 1);
        assert_eq!(e.structure.graph.vertices.len(), 1);
        assert_eq!(e.structure.label(0), Label::Daimon);
        assert_eq!(e.structure.type_of(), rc.type_of());
        assert_eq!(emptying_wrt(&rc, &s, &[1]).unwrap_err(), FatError::BadDoor { position: 1 });
        let parts = fattened_component_members(&rc, 3);
        let whole: Vec<&FatPart> = parts.iter().filter(|p| p.s.contains(0)).collect();
        assert_eq!(whole.len(), 1);
        assert_eq!(whole[0].element.subforest.sigma.len(), 1);
    }

    /// Emptying the violet box: its daimon takes over the edge to the violet
    /// door and the edge into `?⊥`, which crosses two levels.
    #[test]
    fn violet_box_emptied() {
        let rc = fixtures::two_root_boxes().component(0);
        let s = UpwardClosedSet::new(&rc.forest, [2]).unwrap();
        let e = emptying_wrt(&rc, &s, &[]).unwrap();
        let q = &e.structure;
        let dai = (0..q.graph.vertices.len()).find(|&v| q.label(v) == Label::Daimon).unwrap();
        let mut outs: Vec<String> = q.graph.vertices[dai].outputs.iter().map(|&f| q.ty(f).to_string()).collect();
        outs.sort();
        assert_eq!(outs, vec!["1", "bot"]);
        let c = validate_classify(q).unwrap();
        assert!(c.mell && c.proof_structure);
        assert_eq!(e.boundary, vec![2]);
    }

    /// Chain root <- a <- b with S = {b}: a has k >= 1 copies and b as many
    /// copies in total. At bound 2: k = 1 with one b, or k = 2 with b split
    /// {0,2} or {1,1}.
    #[test]
    fn mid_tree_s_fat_count() {
        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let a = b.child(r);
        let c = b.child(a);
        let bot = b.cell(Label::Bot, c, &[], &["bot"]);
        let inner = b.cell(Label::OfCourse, a, &[], &["!bot"]);
        let outer = b.cell(Label::OfCourse, r, &[], &["!!bot"]);
        b.feed(bot, 0, inner);
        b.feed(inner, 0, outer);
        b.conclude(&[b.out(outer, 0)]);
        let rc = b.finish();
        let s = UpwardClosedSet::new(&rc.forest, [c]).unwrap();
        let e = emptying_wrt(&rc, &s, &[]).unwrap();
        let ef = &e.structure.forest;
        let fat: Vec<_> = enumerate_thick_subforests(ef, 2).filter(|t| is_s_fat(t, ef, &e.boundary)).collect();
        assert_eq!(fat.len(), 3);
    }

    #[test]
    fn stripping_gives_members() {
        let r = fixtures::two_root_boxes();
        let rc = r.component(0);
        let parts = fattened_component_members(&rc, 1);
        assert!(parts.iter().any(|p| p.s.nodes.is_empty()));
        for p in &parts {
            assert_eq!(p.element.structure.type_of(), rc.type_of());
            assert!(validate_classify(&p.element.structure).unwrap().dill0_star);
            let rho = strip_component(&rc, p);
            assert!(is_taylor_member(&rho.structure, &rc).is_some());
            let no_dai = !p.element.structure.graph.vertices.iter().any(|v| v.label == Label::Daimon);
            if no_dai {
                assert!(is_iso(&rho.structure, &p.element.structure));
            }
        }
        let all = fattened_members(&r, 1);
        for fat in all.iter().step_by(7) {
            let rho = strip_to_taylor(&r, fat);
            assert!(is_taylor_member(&rho.structure, &r).is_some());
        }
    }
}
