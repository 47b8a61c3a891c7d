//! Expansion of a structure along a thick subforest, as the pullback of the
//! box map and the closure of the subforest's map.

use crate::graph::{closure, closure_map, pullback, Flag, FlagId, NodeId, Orient, RootedForest, StructuredGraph, Vertex, VertexId};
use crate::structure::Qps;

use super::ThickSubforest;

/// A resource structure together with where it came from.
#[derive(Clone, Debug)]
pub struct TaylorElement {
    /// The expanded structure; its forest is the roots of `subforest.sigma`.
    pub structure: Qps,
    pub subforest: ThickSubforest,
    /// Vertex of the original structure each vertex copies.
    pub p_r_vertex: Vec<VertexId>,
    /// Flag of the original structure each flag copies.
    pub p_r_flag: Vec<FlagId>,
    /// Subforest node each vertex lives in.
    pub p_t: Vec<NodeId>,
}

/// Expand `r` along `t`. Inputs of `?`/`!` cells are ordered by the preorder
/// rank of the copy they come from, then by their original rank.
pub fn expand(r: &Qps, t: &ThickSubforest) -> TaylorElement {
    debug_assert!(t.is_valid_for(&r.forest));
    let (bm, fcl) = r.box_morphism().expect("valid structure has a box morphism");
    let scl = closure(&t.sigma);
    let hm = closure_map(&t.sigma, &scl, &t.h, &fcl);
    let pb = pullback(&r.graph.to_graph(), &bm, &scl.graph, &hm);

    let sigma_roots = t.sigma.roots();
    let mut root_index = vec![usize::MAX; t.sigma.len()];
    for (k, &x) in sigma_roots.iter().enumerate() {
        root_index[x] = k;
    }
    let mut pre_rank = vec![0; t.sigma.len()];
    for (k, x) in t.sigma.preorder().into_iter().enumerate() {
        pre_rank[x] = k;
    }

    let nv = pb.graph.vertex_count;
    let p_r_vertex = pb.p_left.vertex_map.clone();
    let p_t = pb.p_right.vertex_map.clone();
    let p_r_flag = pb.p_left.flag_map.clone();

    let mut g = StructuredGraph::default();
    for (pf, &f) in p_r_flag.iter().enumerate() {
        let src = &r.graph.flags[f];
        let partner = pb.graph.involution[pf];
        g.flags.push(Flag {
            vertex: pb.graph.boundary[pf],
            ty: src.ty.clone(),
            orient: src.orient,
            partner: (partner != pf).then_some(partner),
        });
    }
    let mut ins: Vec<Vec<FlagId>> = vec![vec![]; nv];
    let mut outs: Vec<Vec<FlagId>> = vec![vec![]; nv];
    for (pf, fl) in g.flags.iter().enumerate() {
        match fl.orient {
            Orient::In => ins[fl.vertex].push(pf),
            Orient::Out => outs[fl.vertex].push(pf),
        }
    }
    let rank_in = |f: FlagId| {
        let v = r.graph.flags[f].vertex;
        r.graph.vertices[v].inputs.iter().position(|&x| x == f).unwrap_or(0)
    };
    let rank_out = |f: FlagId| {
        let v = r.graph.flags[f].vertex;
        r.graph.vertices[v].outputs.iter().position(|&x| x == f).unwrap_or(0)
    };
    for v in 0..nv {
        let mut i = std::mem::take(&mut ins[v]);
        i.sort_by_key(|&pf| {
            let from = g.flags[pf].partner.map(|p| p_t[g.flags[p].vertex]).unwrap_or(p_t[v]);
            (pre_rank[from], rank_in(p_r_flag[pf]))
        });
        let mut o = std::mem::take(&mut outs[v]);
        o.sort_by_key(|&pf| rank_out(p_r_flag[pf]));
        g.vertices.push(Vertex { label: r.graph.vertices[p_r_vertex[v]].label, inputs: i, outputs: o });
    }
    let mut tails = vec![];
    for &tf in &r.graph.tails {
        tails.extend((0..g.flags.len()).filter(|&pf| p_r_flag[pf] == tf && g.flags[pf].partner.is_none()));
    }
    g.tails = tails;

    let structure = Qps {
        mode: r.mode,
        graph: g,
        forest: RootedForest::roots_only(sigma_roots.len()),
        boxes: p_t.iter().map(|&x| root_index[t.sigma.root_of(x)]).collect(),
    };
    TaylorElement { structure, subforest: t.clone(), p_r_vertex, p_r_flag, p_t }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Label;
    use crate::structure::{is_iso, validate_classify, AxiomMode, Builder};
    use crate::fixtures;

    #[test]
    fn identity_on_box_free() {
        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let ax = b.cell(Label::Ax, r, &[], &["X", "X^"]);
        let one = b.cell(Label::One, r, &[], &["1"]);
        let t = b.cell(Label::Tensor, r, &["X", "1"], &["(X*1)"]);
        b.wire(ax, 0, t, 0);
        b.wire(one, 0, t, 1);
        b.conclude(&[b.out(ax, 1), b.out(t, 0)]);
        let q = b.finish();
        let e = expand(&q, &ThickSubforest::identity(&q.forest));
        assert!(is_iso(&e.structure, &q));
        assert_eq!(e.structure.type_of(), q.type_of());
    }

    /// A box holding one `⊥` under a `!`; zero copies leave a bare `!`.
    #[test]
    fn zero_copies_of_a_box() {
        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let bx = b.child(r);
        let bot = b.cell(Label::Bot, bx, &[], &["bot"]);
        let oc = b.cell(Label::OfCourse, r, &[], &["!bot"]);
        b.feed(bot, 0, oc);
        b.conclude(&[b.out(oc, 0)]);
        let q = b.finish();
        let t = ThickSubforest::roots_of(&q.forest);
        let e = expand(&q, &t);
        // Oracle: only the root copy exists, so only root-box vertices survive,
        // and edges from the box have no copy.
        assert_eq!(e.structure.graph.vertices.len(), 1);
        assert_eq!(e.structure.graph.vertices[0].label, Label::OfCourse);
        assert!(e.structure.graph.vertices[0].inputs.is_empty());
        assert_eq!(e.structure.type_of().to_string(), "!bot");
        let two = ThickSubforest { sigma: RootedForest { parent: vec![None, Some(0), Some(0)] }, h: vec![0, 1, 1] };
        let e2 = expand(&q, &two);
        assert_eq!(e2.structure.graph.vertices.len(), 3);
        let oc2 = (0..3).find(|&v| e2.structure.label(v) == Label::OfCourse).unwrap();
        assert_eq!(e2.structure.graph.vertices[oc2].inputs.len(), 2);
        let c = validate_classify(&e2.structure).unwrap();
        assert!(c.dill0);
    }

    #[test]
    fn example_subforest_expands_to_element() {
        let r = fixtures::two_root_boxes();
        let t = fixtures::example_subforest();
        assert!(t.is_valid_for(&r.forest));
        let e = expand(&r, &t);
        assert_eq!(e.structure.type_of(), r.type_of());
        assert!(validate_classify(&e.structure).unwrap().dill0);
        assert!(is_iso(&e.structure, &fixtures::two_root_element()));
    }
}
