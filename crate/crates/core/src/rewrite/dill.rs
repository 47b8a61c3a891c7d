//! Steps acting on sets of resource structures: the concrete rules on
//! cells, the daimon rules and the box rules, in atomic or η mode.
//!
//! Each element has a set of branches, each branch a set of structures
//! (singletons except for a box with copies). A step on a set picks one
//! branch per element and takes the union.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::formula::Formula;
use crate::graph::{FlagId, Label, NodeId, VertexId};
use crate::structure::{AxiomMode, Draft, Qps};
use crate::taylor::daimon_component;

use super::local::{
    block_at, is_why_not, lone_vertex, partner, pieces, remove_root, splice_tails, split_mix, HashedSet,
};
use super::mell::{exchange, split_why_not, RewriteError};
use super::step::{Step, StepKind};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DillConfig {
    /// Daimon rules of the atomic or η variant.
    pub mode: AxiomMode,
    /// Cut on a block with several daimons: try each daimon, not only the leftmost.
    pub all_daimon_cut_attachments: bool,
}

impl DillConfig {
    pub fn new(mode: AxiomMode) -> DillConfig {
        DillConfig { mode, all_daimon_cut_attachments: false }
    }
}

/// The branches of `step` on one element, each deduplicated up to iso.
pub fn apply_dill(rho: &Qps, step: &Step, cfg: &DillConfig) -> Result<Vec<Vec<Qps>>, RewriteError> {
    step.apply_type(&rho.type_of())?;
    let i = step.i;
    let single = |qs: Vec<Qps>| qs.into_iter().map(|q| vec![q]).collect::<Vec<_>>();
    let branches = match step.kind {
        StepKind::Exc => vec![vec![exchange(rho, i)]],
        StepKind::Mix => {
            let mut all = split_mix(rho, i);
            if let Some(q) = split_daimons(rho, i, cfg.mode) {
                all.extend(split_mix(&q, i));
            }
            single(all)
        }
        StepKind::Ax | StepKind::Dai | StepKind::One | StepKind::Bot | StepKind::Weak => {
            single(hypothesis(rho, step, cfg.mode).into_iter().collect())
        }
        StepKind::Cut => single(cut(rho, step, cfg)),
        StepKind::Tensor | StepKind::Par => single(binary(rho, step).into_iter().collect()),
        StepKind::Contr => single(contraction(rho, i, cfg.mode)),
        StepKind::Der => single(dereliction(rho, i).into_iter().collect()),
        StepKind::Box => box_rule(rho, i, cfg.mode),
    };
    Ok(distinct_branches(branches.into_iter().map(HashedSet::new)).into_iter().map(|b| b.items).collect())
}

/// Drop branches holding the same classes as an earlier one.
fn distinct_branches(branches: impl IntoIterator<Item = HashedSet>) -> Vec<HashedSet> {
    let mut out: Vec<HashedSet> = vec![];
    let mut by_key: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
    for b in branches {
        let slot = by_key.entry(b.hashes.clone()).or_default();
        if !slot.iter().any(|&k| out[k].same(&b)) {
            slot.push(out.len());
            out.push(b);
        }
    }
    out
}

/// Every set reachable from `pi` by `step`, each deduplicated up to iso.
pub fn apply_dill_set(pi: &[Qps], step: &Step, cfg: &DillConfig) -> Result<Vec<Vec<Qps>>, RewriteError> {
    let pi = HashedSet::new(pi.iter().cloned());
    let mut per: Vec<Vec<HashedSet>> = vec![];
    for rho in &pi.items {
        let branches = apply_dill(rho, step, cfg)?;
        per.push(branches.into_iter().map(HashedSet::new).collect());
    }
    if per.iter().any(Vec::is_empty) {
        return Ok(vec![]);
    }
    let mut sets = vec![];
    let mut choice = vec![0usize; per.len()];
    loop {
        let union = choice.iter().enumerate().flat_map(|(k, &c)| per[k][c].pairs().map(|(h, q)| (h, q.clone())));
        sets.push(HashedSet::from_hashed(union));
        // Mixed-radix increment over the branch choices.
        let mut k = 0;
        loop {
            if k == per.len() {
                return Ok(distinct_branches(sets).into_iter().map(|b| b.items).collect());
            }
            choice[k] += 1;
            if choice[k] < per[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Conclusion position an output of a daimon stands for: its own, or in η
/// mode the one of the `?`-cell it feeds.
fn daimon_output_position(q: &Qps, o: FlagId, mode: AxiomMode) -> Option<usize> {
    if let Some(p) = q.position(o) {
        return Some(p);
    }
    let w = q.vertex_of(q.graph.flags[o].partner?);
    if mode == AxiomMode::Eta && is_why_not(q, w) {
        return q.position(q.graph.vertices[w].outputs[0]);
    }
    None
}

/// Split every daimon of the block of `i` whose outputs stand on both sides
/// of `i | i+1`. `None` when no daimon straddles or one cannot be split.
fn split_daimons(q: &Qps, i: usize, mode: AxiomMode) -> Option<Qps> {
    let b = block_at(q, i)?;
    let mut d = Draft::new(q.clone());
    let mut changed = false;
    for v in q.vertices_under(b.root) {
        if q.label(v) != Label::Daimon {
            continue;
        }
        let outs = &q.graph.vertices[v].outputs;
        let pos: Vec<Option<usize>> = outs.iter().map(|&o| daimon_output_position(q, o, mode)).collect();
        let left = pos.iter().any(|p| p.is_some_and(|p| p <= i));
        let right = pos.iter().any(|p| p.is_some_and(|p| p > i));
        if !(left && right) {
            continue;
        }
        if pos.iter().any(Option::is_none) {
            return None;
        }
        let w = d.add_vertex(Label::Daimon, q.boxes[v], &[], &[]);
        for (k, &o) in outs.iter().enumerate() {
            if pos[k].expect("checked") > i {
                d.move_output(o, w);
            }
        }
        changed = true;
    }
    changed.then(|| d.finish())
}

/// Whether the tree of `root` is a daimon standing alone (in η mode possibly
/// behind `?`-cells).
fn lone_daimon(q: &Qps, root: NodeId, mode: AxiomMode) -> Option<VertexId> {
    match mode {
        AxiomMode::Atomic => lone_vertex(q, root).filter(|&v| q.label(v) == Label::Daimon),
        AxiomMode::Eta => {
            daimon_component(q, root)?;
            q.vertices_under(root).into_iter().find(|&v| q.label(v) == Label::Daimon)
        }
    }
}

fn hypothesis(q: &Qps, step: &Step, mode: AxiomMode) -> Option<Qps> {
    let b = block_at(q, step.i)?;
    if lone_daimon(q, b.root, mode).is_some() {
        return Some(remove_root(q, b.root));
    }
    let v = lone_vertex(q, b.root)?;
    let vx = &q.graph.vertices[v];
    let ok = match step.kind {
        StepKind::Ax => vx.label == Label::Ax,
        StepKind::One => vx.label == Label::One,
        StepKind::Bot => vx.label == Label::Bot,
        StepKind::Weak => vx.label == Label::WhyNot && vx.inputs.is_empty(),
        _ => false,
    };
    ok.then(|| remove_root(q, b.root))
}

fn cut(q: &Qps, step: &Step, cfg: &DillConfig) -> Vec<Qps> {
    let a = step.cut.as_ref().expect("typed cut carries a formula");
    let Some(b) = block_at(q, step.i - 1) else { return vec![] };
    let vs = q.vertices_under(b.root);
    let mut out = vec![];
    for &v in &vs {
        if q.label(v) == Label::Cut && q.ty(q.graph.vertices[v].inputs[0]) == a {
            let ins = q.graph.vertices[v].inputs.clone();
            let opened = [partner(q, ins[0]), partner(q, ins[1])];
            let mut d = Draft::new(q.clone());
            d.remove_vertex(v);
            let mut tails = q.conclusions().to_vec();
            splice_tails(&mut tails, step.i - 1, 0, &opened);
            d.set_tails(tails);
            out.push(d.finish());
        }
    }
    // Daimons of the block, leftmost first by the conclusions they stand for.
    let mut dais: Vec<(usize, VertexId)> = vs
        .iter()
        .copied()
        .filter(|&v| q.label(v) == Label::Daimon)
        .map(|v| {
            let first = q.graph.vertices[v]
                .outputs
                .iter()
                .filter_map(|&o| daimon_output_position(q, o, cfg.mode))
                .min()
                .unwrap_or(usize::MAX);
            (first, v)
        })
        .collect();
    dais.sort_unstable();
    let take = if cfg.all_daimon_cut_attachments { dais.len() } else { dais.len().min(1) };
    for &(_, v) in &dais[..take] {
        let mut d = Draft::new(q.clone());
        let o1 = d.add_output(v, a.clone());
        let o2 = d.add_output(v, a.dual());
        let mut tails = q.conclusions().to_vec();
        splice_tails(&mut tails, step.i - 1, 0, &[o1, o2]);
        d.set_tails(tails);
        out.push(d.finish());
    }
    out
}

/// Replace the daimon output at conclusion `i` by outputs of the given types,
/// which become conclusions in its place.
fn split_daimon_output(q: &Qps, i: usize, types: &[Formula]) -> Qps {
    let t = q.conclusion(i).expect("position in range");
    let v = q.vertex_of(t);
    let mut d = Draft::new(q.clone());
    let new: Vec<FlagId> = types.iter().map(|ty| d.add_output(v, ty.clone())).collect();
    let mut outs: Vec<FlagId> = q.graph.vertices[v].outputs.clone();
    let at = outs.iter().position(|&o| o == t).expect("output of its vertex");
    splice_tails(&mut outs, at, 1, &new);
    d.q.graph.vertices[v].outputs = outs;
    let mut tails = q.conclusions().to_vec();
    splice_tails(&mut tails, i - 1, 1, &new);
    d.set_tails(tails);
    d.finish()
}

/// The vertex at conclusion `i`, when it is a daimon.
fn daimon_at(q: &Qps, i: usize) -> Option<VertexId> {
    let v = q.vertex_of(q.conclusion(i)?);
    (q.label(v) == Label::Daimon).then_some(v)
}

fn binary(q: &Qps, step: &Step) -> Option<Qps> {
    let t = q.conclusion(step.i)?;
    let v = q.vertex_of(t);
    let (a, b) = match q.ty(t) {
        Formula::Tensor(a, b) | Formula::Par(a, b) => ((**a).clone(), (**b).clone()),
        _ => return None,
    };
    if daimon_at(q, step.i).is_some() {
        return Some(split_daimon_output(q, step.i, &[a, b]));
    }
    let want = if step.kind == StepKind::Tensor { Label::Tensor } else { Label::Par };
    if q.label(v) != want {
        return None;
    }
    let ins = q.graph.vertices[v].inputs.clone();
    let opened = [partner(q, ins[0]), partner(q, ins[1])];
    let mut d = Draft::new(q.clone());
    d.remove_vertex(v);
    let mut tails = q.conclusions().to_vec();
    splice_tails(&mut tails, step.i - 1, 1, &opened);
    d.set_tails(tails);
    Some(d.finish())
}

/// Concrete `?`-cells split their inputs in every way, parts possibly empty.
/// A daimon output `?A` becomes two outputs, routed through fresh unary
/// `?`-cells in η mode.
fn contraction(q: &Qps, i: usize, mode: AxiomMode) -> Vec<Qps> {
    let Some(t) = q.conclusion(i) else { return vec![] };
    let v = q.vertex_of(t);
    let ty = q.ty(t).clone();
    if daimon_at(q, i).is_some() {
        return match mode {
            AxiomMode::Atomic => vec![split_daimon_output(q, i, &[ty.clone(), ty])],
            AxiomMode::Eta => {
                let body = ty.why_not_body().expect("typed contraction").clone();
                let q2 = split_daimon_output(q, i, &[body.clone(), body.clone()]);
                vec![route_through_why_not(&q2, &[i, i + 1])]
            }
        };
    }
    if !is_why_not(q, v) {
        return vec![];
    }
    let ins = q.graph.vertices[v].inputs.clone();
    let n = ins.len();
    (0u64..(1 << n))
        .map(|mask| {
            let keep: Vec<FlagId> = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| ins[b]).collect();
            split_why_not(q, i, &keep)
        })
        .collect()
}

/// Put a fresh unary `?`-cell behind each listed conclusion.
fn route_through_why_not(q: &Qps, positions: &[usize]) -> Qps {
    let mut d = Draft::new(q.clone());
    let mut tails = q.conclusions().to_vec();
    for &p in positions {
        let t = tails[p - 1];
        let ty = q.ty(t).clone();
        let w = d.add_vertex(Label::WhyNot, q.boxes[q.vertex_of(t)], std::slice::from_ref(&ty), &[Formula::why_not(ty.clone())]);
        let inp = d.q.graph.vertices[w].inputs[0];
        d.glue(t, inp);
        tails[p - 1] = d.q.graph.vertices[w].outputs[0];
    }
    d.set_tails(tails);
    d.finish()
}

fn dereliction(q: &Qps, i: usize) -> Option<Qps> {
    let t = q.conclusion(i)?;
    if daimon_at(q, i).is_some() {
        let mut q = q.clone();
        let body = q.ty(t).why_not_body()?.clone();
        q.graph.flags[t].ty = body;
        return Some(q);
    }
    let v = q.vertex_of(t);
    let ins = &q.graph.vertices[v].inputs;
    if !is_why_not(q, v) || ins.len() != 1 {
        return None;
    }
    let p = partner(q, ins[0]);
    let mut d = Draft::new(q.clone());
    d.remove_vertex(v);
    let mut tails = q.conclusions().to_vec();
    tails[i - 1] = p;
    d.set_tails(tails);
    Some(d.finish())
}

/// Daimoned, empty and non-empty box rules.
fn box_rule(q: &Qps, i: usize, mode: AxiomMode) -> Vec<Vec<Qps>> {
    let Some(b) = block_at(q, i) else { return vec![] };
    let t = q.conclusion(i).expect("typed position");
    if lone_daimon(q, b.root, mode).is_some() && daimon_at(q, i).is_some() {
        let mut q = q.clone();
        let body = q.ty(t).of_course_body().expect("typed box").clone();
        q.graph.flags[t].ty = body;
        return vec![vec![q]];
    }
    let door = q.vertex_of(t);
    if q.label(door) != Label::OfCourse {
        return vec![];
    }
    let frontier: Vec<VertexId> = b.positions().filter(|&p| p != i).map(|p| q.vertex_of(q.conclusion(p).expect("in block"))).collect();
    let mut distinct = frontier.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() != frontier.len() || frontier.iter().any(|&v| !is_why_not(q, v)) {
        return vec![];
    }
    let mut border = frontier.clone();
    border.push(door);
    let ps = pieces(q, b.root, &border);
    let copies = q.graph.vertices[door].inputs.clone();
    if copies.is_empty() {
        // Empty box: nothing but the 0-ary door and 0-ary ?-cells.
        if !ps.is_empty() || frontier.iter().any(|&v| !q.graph.vertices[v].inputs.is_empty()) {
            return vec![];
        }
        let mut d = Draft::new(q.clone());
        for &v in &border {
            d.remove_vertex(v);
        }
        let types: Vec<Formula> = b
            .tails
            .iter()
            .map(|&f| if f == t { q.ty(f).of_course_body().expect("typed box").clone() } else { q.ty(f).clone() })
            .collect();
        let dai = d.add_vertex(Label::Daimon, b.root, &[], &types);
        let outs = d.q.graph.vertices[dai].outputs.clone();
        let mut tails = q.conclusions().to_vec();
        splice_tails(&mut tails, b.start - 1, b.tails.len(), &outs);
        d.set_tails(tails);
        return vec![vec![d.finish()]];
    }
    // Each copy must sit in its own piece.
    let piece_of = |v: VertexId| ps.iter().position(|p| p.contains(&v));
    let mut owner: Vec<Option<usize>> = vec![None; ps.len()];
    for (j, &f) in copies.iter().enumerate() {
        let Some(k) = piece_of(q.vertex_of(partner(q, f))) else { return vec![] };
        if owner[k].is_some() {
            return vec![];
        }
        owner[k] = Some(j);
    }
    let floating: Vec<usize> = (0..ps.len()).filter(|&k| owner[k].is_none()).collect();
    let n = copies.len();
    let total = n.checked_pow(floating.len() as u32).unwrap_or(usize::MAX);
    let mut out = vec![];
    for mut code in 0..total {
        let mut assign = owner.clone();
        for &k in &floating {
            assign[k] = Some(code % n);
            code /= n;
        }
        let branch: Vec<Qps> = (0..n)
            .map(|j| {
                let mut d = Draft::new(q.clone());
                d.remove_vertex(door);
                for (k, p) in ps.iter().enumerate() {
                    if assign[k] != Some(j) {
                        p.iter().for_each(|&v| d.remove_vertex(v));
                    }
                }
                for &w in &frontier {
                    for f in q.graph.vertices[w].inputs.clone() {
                        if d.q.graph.flags[f].partner.is_none() {
                            d.drop_input(f);
                        }
                    }
                }
                let mut tails = q.conclusions().to_vec();
                tails[i - 1] = partner(q, copies[j]);
                d.set_tails(tails);
                d.finish()
            })
            .collect();
        out.push(branch);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{is_iso, validate_classify, Builder};

    fn daimon(types: &[&str]) -> Qps {
        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let d = b.cell(Label::Daimon, r, &[], types);
        let outs: Vec<FlagId> = (0..types.len()).map(|k| b.out(d, k)).collect();
        b.conclude(&outs);
        b.finish()
    }

    fn atomic() -> DillConfig {
        DillConfig::new(AxiomMode::Atomic)
    }

    #[test]
    fn empty_box_creates_a_daimon() {
        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let w = b.cell(Label::WhyNot, r, &[], &["??bot"]);
        let o = b.cell(Label::OfCourse, r, &[], &["!!(A^|A)"]);
        b.conclude(&[b.out(w, 0), b.out(o, 0)]);
        let rho = b.finish();
        let out = apply_dill_set(&[rho], &Step::new(StepKind::Box, 2), &atomic()).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].len(), 1);
        assert!(is_iso(&out[0][0], &daimon(&["??bot", "!(A^|A)"])));
    }

    #[test]
    fn daimon_contraction_atomic_and_eta() {
        let rho = daimon(&["?bot"]);
        let out = apply_dill_set(std::slice::from_ref(&rho), &Step::new(StepKind::Contr, 1), &atomic()).unwrap();
        assert_eq!(out.len(), 1);
        assert!(is_iso(&out[0][0], &daimon(&["?bot", "?bot"])));
        let eta = apply_dill_set(&[rho], &Step::new(StepKind::Contr, 1), &DillConfig::new(AxiomMode::Eta)).unwrap();
        let q = &eta[0][0];
        assert_eq!(q.type_of().to_string(), "?bot,?bot");
        assert_eq!(daimon_component(q, q.forest.roots()[0]), Some(vec![1, 2]));
    }

    /// `!` with two copies, each a `1`-cell; one copy also feeds a `?⊥` via
    /// nothing, and a lone `⊥` feeds the `?⊥` (a floating piece).
    #[test]
    fn non_empty_box_partitions_copies() {
        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let w = b.cell(Label::WhyNot, r, &[], &["?bot"]);
        let door = b.cell(Label::OfCourse, r, &[], &["!1"]);
        for _ in 0..2 {
            let o = b.cell(Label::One, r, &[], &["1"]);
            b.feed(o, 0, door);
        }
        let x = b.cell(Label::Bot, r, &[], &["bot"]);
        b.feed(x, 0, w);
        b.conclude(&[b.out(w, 0), b.out(door, 0)]);
        let rho = b.finish();
        let branches = apply_dill(&rho, &Step::new(StepKind::Box, 2), &atomic()).unwrap();
        // The floating ⊥ goes with either copy; both assignments are iso.
        assert_eq!(branches.len(), 1);
        let set = &branches[0];
        assert_eq!(set.len(), 2);
        for q in set {
            assert_eq!(q.type_of().to_string(), "?bot,1");
            assert!(validate_classify(q).unwrap().dill0);
        }
        let arities: Vec<usize> = set
            .iter()
            .map(|q| q.graph.vertices[q.vertex_of(q.conclusion(1).unwrap())].inputs.len())
            .collect();
        assert!(arities.contains(&0) && arities.contains(&1));
    }

    #[test]
    fn connected_copies_block_the_box() {
        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let door = b.cell(Label::OfCourse, r, &[], &["!(X*X^)"]);
        let a = b.cell(Label::Ax, r, &[], &["X", "X^"]);
        let t1 = b.cell(Label::Tensor, r, &["X", "X^"], &["(X*X^)"]);
        let a2 = b.cell(Label::Ax, r, &[], &["X", "X^"]);
        let t2 = b.cell(Label::Tensor, r, &["X", "X^"], &["(X*X^)"]);
        b.wire(a, 0, t1, 0);
        b.wire(a2, 1, t1, 1);
        b.wire(a2, 0, t2, 0);
        b.wire(a, 1, t2, 1);
        b.feed(t1, 0, door);
        b.feed(t2, 0, door);
        b.conclude(&[b.out(door, 0)]);
        assert!(apply_dill(&b.finish(), &Step::new(StepKind::Box, 1), &atomic()).unwrap().is_empty());
    }

    #[test]
    fn daimon_mix_cut_and_hypothesis() {
        let rho = daimon(&["?bot", "X^", "X"]);
        let mixed = apply_dill_set(std::slice::from_ref(&rho), &Step::new(StepKind::Mix, 1), &atomic()).unwrap();
        assert_eq!(mixed.len(), 1);
        assert!(is_iso(&mixed[0][0], &daimon(&["?bot"]).juxtapose(&daimon(&["X^", "X"]))));
        let gone = apply_dill_set(&mixed[0], &Step::new(StepKind::Ax, 2), &atomic()).unwrap();
        assert!(is_iso(&gone[0][0], &daimon(&["?bot"])));
        let cut = apply_dill_set(&[daimon(&["1"])], &Step::cut(2, "Y".parse().unwrap()), &atomic()).unwrap();
        assert!(is_iso(&cut[0][0], &daimon(&["1", "Y", "Y^"])));
    }

    #[test]
    fn set_action_is_a_union_of_choices() {
        // Contraction on a binary ?-cell: four splits, three iso classes.
        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let w = b.cell(Label::WhyNot, r, &[], &["?bot"]);
        for _ in 0..2 {
            let x = b.cell(Label::Bot, r, &[], &["bot"]);
            b.feed(x, 0, w);
        }
        b.conclude(&[b.out(w, 0)]);
        let rho = b.finish();
        let step = Step::new(StepKind::Contr, 1);
        assert_eq!(apply_dill(&rho, &step, &atomic()).unwrap().len(), 3);
        let sets = apply_dill_set(&[rho, daimon(&["?bot"])], &step, &atomic()).unwrap();
        assert_eq!(sets.len(), 3);
        assert!(sets.iter().all(|s| s.len() == 2));
    }
}
