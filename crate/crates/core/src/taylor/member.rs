//! Deciding membership in the Taylor expansion.
//!
//! Each root is searched independently. A copy of a box contributes a fixed
//! count vector: one entry per vertex signature of the box content and one
//! per edge signature whose source lies in the box. The counts of an element
//! are therefore the sum over the chosen copies, which prunes the search to
//! subforests whose counts match exactly; survivors are checked by iso.

use std::collections::HashMap;
use std::rc::Rc;

use crate::graph::{Label, NodeId, VertexId};
use crate::structure::{is_iso, Qps};

use super::thick::{subforest_of, Shape};
use super::{expand, ThickSubforest};

/// Label and types of a vertex, with unordered flag groups sorted.
fn vertex_sig(q: &Qps, v: VertexId) -> String {
    let vx = &q.graph.vertices[v];
    let tys = |fs: &[usize], sort: bool| {
        let mut t: Vec<String> = fs.iter().map(|&f| q.ty(f).to_string()).collect();
        if sort {
            t.sort();
        }
        t.join(",")
    };
    let l = vx.label;
    let ins = if l.is_exponential() { String::new() } else { tys(&vx.inputs, l == Label::Cut) };
    let outs = tys(&vx.outputs, matches!(l, Label::Ax | Label::Daimon));
    format!("{}({ins})({outs})", l.name())
}

struct Signatures {
    dims: HashMap<String, usize>,
}

impl Signatures {
    fn new() -> Signatures {
        Signatures { dims: HashMap::new() }
    }

    fn intern(&mut self, s: String) -> usize {
        let n = self.dims.len();
        *self.dims.entry(s).or_insert(n)
    }

    /// Signature keys of a vertex and of each edge it sources.
    fn keys(q: &Qps, v: VertexId) -> Vec<String> {
        let mut ks = vec![vertex_sig(q, v)];
        for &o in &q.graph.vertices[v].outputs {
            if let Some(i) = q.graph.flags[o].partner {
                ks.push(format!("{}>{}@{}", ks[0], vertex_sig(q, q.vertex_of(i)), q.ty(o)));
            }
        }
        ks
    }
}

fn add(a: &mut [u32], b: &[u32]) {
    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
}

fn fits(v: &[u32], budget: &[u32]) -> bool {
    v.iter().zip(budget).all(|(x, y)| x <= y)
}

struct Search<'a> {
    kids: Vec<Vec<NodeId>>,
    base: &'a [Vec<u32>],
}

impl Search<'_> {
    /// All shapes at `n` whose count vector fits in `budget`.
    fn shapes(&self, n: NodeId, budget: &[u32]) -> Vec<(Rc<Shape>, Vec<u32>)> {
        if !fits(&self.base[n], budget) {
            return vec![];
        }
        let mut partial: Vec<(Vec<Rc<Shape>>, Vec<u32>)> = vec![(vec![], self.base[n].clone())];
        for &c in &self.kids[n] {
            let mut next = vec![];
            for (ks, used) in &partial {
                let rest: Vec<u32> = budget.iter().zip(used).map(|(b, u)| b - u).collect();
                let subs = self.shapes(c, &rest);
                let mut acc = vec![];
                multisets_within(&subs, 0, used.clone(), budget, &mut vec![], &mut acc);
                for (pick, total) in acc {
                    let mut ks2 = ks.clone();
                    ks2.extend(pick);
                    next.push((ks2, total));
                }
            }
            partial = next;
        }
        partial.into_iter().map(|(ks, v)| (Rc::new(Shape { node: n, kids: ks }), v)).collect()
    }
}

/// Non-decreasing picks from `items` starting at `from`, keeping the running
/// total within `budget`. Every item has a nonzero vector, so this ends.
fn multisets_within(
    items: &[(Rc<Shape>, Vec<u32>)],
    from: usize,
    total: Vec<u32>,
    budget: &[u32],
    pick: &mut Vec<Rc<Shape>>,
    out: &mut Vec<(Vec<Rc<Shape>>, Vec<u32>)>,
) {
    out.push((pick.clone(), total.clone()));
    for i in from..items.len() {
        let mut t = total.clone();
        add(&mut t, &items[i].1);
        if fits(&t, budget) && items[i].1.iter().any(|&x| x > 0) {
            pick.push(items[i].0.clone());
            multisets_within(items, i, t, budget, pick, out);
            pick.pop();
        }
    }
}

/// Pair each root of `r` with the root of `rho` holding the same conclusion
/// positions, in `r`'s root order.
pub(crate) fn match_roots(rho: &Qps, r: &Qps) -> Option<Vec<(NodeId, NodeId)>> {
    if rho.type_of() != r.type_of() || rho.forest.roots().len() != r.forest.roots().len() {
        return None;
    }
    let pos = |q: &Qps, fs: &[usize]| fs.iter().map(|&f| q.position(f)).collect::<Vec<_>>();
    let rb = r.blocks();
    let pb = rho.blocks();
    let mut out = vec![];
    for rr in r.forest.roots() {
        let (_, fs) = rb.iter().find(|(x, _)| *x == rr)?;
        let want = pos(r, fs);
        let (pr, _) = pb.iter().find(|(_, gs)| pos(rho, gs) == want)?;
        out.push((rr, *pr));
    }
    Some(out)
}

/// Decide whether `rho` is (iso to) an expansion of `r`; the witness is the
/// subforest. Roots listed in `skip` are not searched and get a bare copy.
pub(crate) fn member_except(rho: &Qps, r: &Qps, skip: &[NodeId]) -> Option<ThickSubforest> {
    let pairs = match_roots(rho, r)?;
    let mut sigs = Signatures::new();
    let mut base: Vec<Vec<(usize, u32)>> = vec![vec![]; r.forest.len()];
    for v in 0..r.graph.vertices.len() {
        for k in Signatures::keys(r, v) {
            let d = sigs.intern(k);
            base[r.boxes[v]].push((d, 1));
        }
    }
    let dim = sigs.dims.len();
    let dense: Vec<Vec<u32>> = base
        .iter()
        .map(|es| {
            let mut v = vec![0; dim];
            es.iter().for_each(|&(d, c)| v[d] += c);
            v
        })
        .collect();
    let search = Search { kids: r.forest.children_table(), base: &dense };

    let mut chosen: Vec<Rc<Shape>> = r.forest.roots().into_iter().map(|n| Rc::new(Shape::leaf(n))).collect();
    for (k, &(rr, pr)) in pairs.iter().enumerate() {
        if skip.contains(&rr) {
            continue;
        }
        let target_q = rho.component(pr);
        let mut target = vec![0; dim];
        for v in 0..target_q.graph.vertices.len() {
            for key in Signatures::keys(&target_q, v) {
                match sigs.dims.get(&key) {
                    Some(&d) => target[d] += 1,
                    None => return None,
                }
            }
        }
        let found = search.shapes(rr, &target).into_iter().filter(|(_, v)| *v == target).find(|(s, _)| {
            let mut trial = chosen.clone();
            trial[k] = s.clone();
            let e = expand(r, &subforest_of(&trial));
            is_iso(&e.structure.component(k), &target_q)
        });
        chosen[k] = found?.0;
    }
    Some(subforest_of(&chosen))
}

/// Some subforest `t` with `expand(r, t)` iso to `rho`, if any.
pub fn is_taylor_member(rho: &Qps, r: &Qps) -> Option<ThickSubforest> {
    member_except(rho, r, &[])
}
