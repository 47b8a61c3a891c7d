//! Emptyings: whole root components replaced by a daimon with the same
//! conclusions, optionally (η variant) behind `?`-cells.

use serde::{Deserialize, Serialize};

use crate::graph::{FlagId, Label, NodeId, VertexId};
use crate::structure::{Draft, Qps};

use super::member::{match_roots, member_except};
use super::ThickSubforest;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    #[default]
    Filled,
    Eta,
}

/// Replace the components of `roots` by one daimon each. Conclusions at the
/// 1-based positions in `routed` that belong to an emptied root go through a
/// fresh unary `?`-cell; they must have a `?A` type.
pub fn empty_roots(rho: &Qps, roots: &[NodeId], routed: &[usize]) -> Qps {
    let mut d = Draft::new(rho.clone());
    let mut tails: Vec<FlagId> = rho.conclusions().to_vec();
    for &r in roots {
        for v in rho.vertices_under(r) {
            d.remove_vertex(v);
        }
        for n in 0..rho.forest.len() {
            if n != r && rho.forest.root_of(n) == r {
                d.remove_node(n);
            }
        }
        let dai = d.add_vertex(Label::Daimon, r, &[], &[]);
        for (k, t) in tails.iter_mut().enumerate() {
            let old = rho.conclusions()[k];
            if rho.root_of_vertex(rho.vertex_of(old)) != r {
                continue;
            }
            let ty = rho.ty(old).clone();
            match (routed.contains(&(k + 1)), ty.why_not_body()) {
                (true, Some(body)) => {
                    let o = d.add_output(dai, body.clone());
                    let w = d.add_vertex(Label::WhyNot, r, std::slice::from_ref(body), std::slice::from_ref(&ty));
                    let i = d.q.graph.vertices[w].inputs[0];
                    d.glue(o, i);
                    *t = d.q.graph.vertices[w].outputs[0];
                }
                _ => *t = d.add_output(dai, ty),
            }
        }
    }
    d.set_tails(tails);
    d.finish()
}

/// Every emptying of `rho`: root subsets in block order by bitmask and, in
/// the η variant, every routing of `?`-typed conclusions that are outputs of
/// `?`-cells in `rho`.
pub fn emptyings(rho: &Qps, variant: Variant) -> Vec<Qps> {
    let roots: Vec<NodeId> = rho.blocks().into_iter().map(|(r, _)| r).collect();
    let mut out = vec![];
    for mask in 0u64..(1 << roots.len()) {
        let chosen: Vec<NodeId> = (0..roots.len()).filter(|k| mask >> k & 1 == 1).map(|k| roots[k]).collect();
        let routable: Vec<usize> = match variant {
            Variant::Filled => vec![],
            Variant::Eta => (1..=rho.conclusions().len())
                .filter(|&i| {
                    let t = rho.conclusion(i).expect("position in range");
                    let v = rho.vertex_of(t);
                    rho.label(v) == Label::WhyNot && chosen.contains(&rho.root_of_vertex(v))
                })
                .collect(),
        };
        for rmask in 0u64..(1 << routable.len()) {
            let routed: Vec<usize> = (0..routable.len()).filter(|k| rmask >> k & 1 == 1).map(|k| routable[k]).collect();
            out.push(empty_roots(rho, &chosen, &routed));
        }
    }
    out
}

/// If the component of `root` is a lone daimon whose outputs are tails or
/// feed `?`-cells with tail outputs, the positions behind `?`-cells.
pub fn daimon_component(q: &Qps, root: NodeId) -> Option<Vec<usize>> {
    let vs = q.vertices_under(root);
    let dais: Vec<VertexId> = vs.iter().copied().filter(|&v| q.label(v) == Label::Daimon).collect();
    let [dai] = dais.as_slice() else { return None };
    let mut routed = vec![];
    for &v in &vs {
        if v == *dai {
            continue;
        }
        let vx = &q.graph.vertices[v];
        let fed_by_dai = vx.inputs.iter().all(|&i| q.source(i) == Some(*dai));
        if q.label(v) != Label::WhyNot || vx.inputs.is_empty() || !fed_by_dai {
            return None;
        }
        routed.push(q.position(vx.outputs[0])?);
    }
    routed.sort_unstable();
    Some(routed)
}

/// Explanation of a filled element: the subforest for the kept roots, the
/// emptied roots of the structure and the routed conclusion positions.
#[derive(Clone, Debug)]
pub struct FilledWitness {
    pub subforest: ThickSubforest,
    pub emptied: Vec<NodeId>,
    pub routed: Vec<usize>,
}

/// Whether `rho` is an emptying (of the given variant) of a Taylor element of `r`.
pub fn is_filled_member(rho: &Qps, r: &Qps, variant: Variant) -> Option<FilledWitness> {
    let pairs = match_roots(rho, r)?;
    let is_why_not_in_r = |i: usize| r.conclusion(i).is_some_and(|t| r.label(r.vertex_of(t)) == Label::WhyNot);
    let mut emptied = vec![];
    let mut routed = vec![];
    for &(rr, pr) in &pairs {
        let Some(rt) = daimon_component(rho, pr) else { continue };
        let ok = match variant {
            Variant::Filled => rt.is_empty(),
            Variant::Eta => rt.iter().all(|&i| is_why_not_in_r(i)),
        };
        if ok {
            emptied.push(rr);
            routed.extend(rt);
        }
    }
    let subforest = member_except(rho, r, &emptied)?;
    Some(FilledWitness { subforest, emptied, routed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::structure::{is_iso, validate_classify, AxiomMode, Builder};

    #[test]
    fn empty_subset_is_identity() {
        let rho = fixtures::two_root_element();
        let all = emptyings(&rho, Variant::Filled);
        assert_eq!(all.len(), 4);
        assert!(is_iso(&all[0], &rho));
        assert!(all.iter().all(|e| e.type_of() == rho.type_of()));
        assert!(all.iter().all(|e| validate_classify(e).unwrap().dill0_star));
    }

    #[test]
    fn green_root_emptied() {
        let rho = fixtures::two_root_element();
        let e = empty_roots(&rho, &[0], &[]);
        assert!(is_iso(&e.component(0), &fixtures::two_root_emptying().component(0)));
        assert!(is_iso(&e.component(1), &rho.component(1)));
        let eta = empty_roots(&rho, &[0], &[3]);
        assert!(is_iso(&eta.component(0), &fixtures::two_root_eta_emptying().component(0)));
        // Eta emptyings: 4 root subsets, two of which allow routing ?!1.
        assert_eq!(emptyings(&rho, Variant::Eta).len(), 6);
    }

    #[test]
    fn emptied_elements_are_filled_members() {
        let r = fixtures::two_root_boxes();
        let w = is_filled_member(&fixtures::two_root_emptying(), &r, Variant::Filled).expect("filled member");
        assert_eq!(w.emptied, vec![0]);
        assert!(is_filled_member(&fixtures::two_root_eta_emptying(), &r, Variant::Filled).is_none());
        let w = is_filled_member(&fixtures::two_root_eta_emptying(), &r, Variant::Eta).expect("eta member");
        assert_eq!(w.routed, vec![3]);
        for v in [Variant::Filled, Variant::Eta] {
            assert!(is_filled_member(&fixtures::two_root_element(), &r, v).is_some());
        }
    }

    #[test]
    fn daimon_on_one_against_bot() {
        let mut b = Builder::new(AxiomMode::Atomic);
        let n = b.root();
        let d = b.cell(Label::Daimon, n, &[], &["1"]);
        b.conclude(&[b.out(d, 0)]);
        let rho = b.finish();
        let mut b = Builder::new(AxiomMode::Atomic);
        let n = b.root();
        let x = b.cell(Label::Bot, n, &[], &["bot"]);
        b.conclude(&[b.out(x, 0)]);
        let r = b.finish();
        assert!(is_filled_member(&rho, &r, Variant::Filled).is_none());
        assert!(is_filled_member(&rho, &r, Variant::Eta).is_none());
    }
}
