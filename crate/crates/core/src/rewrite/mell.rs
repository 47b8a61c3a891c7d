//! Steps acting on MELL quasi-proof-structures, forwards (a set of results)
//! and backwards (a function of the target and the source context).

use thiserror::Error;

use crate::formula::{Context, Formula};
use crate::graph::{FlagId, Label, VertexId};
use crate::structure::{Draft, Qps};

use super::local::{block_at, dedupe, is_why_not, lone_vertex, merge_roots, partner, remove_root, splice_tails, split_mix};
use super::step::{Step, StepKind, TypeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("{step}: structure has type {found}, expected {expected}")]
    TypeMismatch { step: Step, expected: Context, found: Context },
    #[error("{step}: cannot be read backwards: {reason}")]
    Irreversible { step: Step, reason: String },
}

/// All results of `step` on `r`, up to isomorphism. Empty when the rule does
/// not apply; an error when `r` does not have a type the step accepts.
pub fn apply_mell(r: &Qps, step: &Step) -> Result<Vec<Qps>, RewriteError> {
    step.apply_type(&r.type_of())?;
    let i = step.i;
    let out = match step.kind {
        StepKind::Exc => vec![exchange(r, i)],
        StepKind::Mix => split_mix(r, i),
        StepKind::Ax | StepKind::Dai | StepKind::One | StepKind::Bot | StepKind::Weak => {
            hypothesis(r, step).into_iter().collect()
        }
        StepKind::Cut => cut(r, step),
        StepKind::Tensor | StepKind::Par => binary(r, step).into_iter().collect(),
        StepKind::Contr => contraction(r, step),
        StepKind::Der => dereliction(r, i).into_iter().collect(),
        StepKind::Box => open_box(r, i).into_iter().collect(),
    };
    Ok(dedupe(out))
}

pub(crate) fn exchange(q: &Qps, i: usize) -> Qps {
    let mut q = q.clone();
    q.graph.tails.swap(i - 1, i);
    q
}

/// The block of `i` is one input-free cell of the step's kind.
fn hypothesis(r: &Qps, step: &Step) -> Option<Qps> {
    let b = block_at(r, step.i)?;
    let v = lone_vertex(r, b.root)?;
    let vx = &r.graph.vertices[v];
    let ok = match step.kind {
        StepKind::Ax => vx.label == Label::Ax,
        StepKind::Dai => vx.label == Label::Daimon,
        StepKind::One => vx.label == Label::One,
        StepKind::Bot => vx.label == Label::Bot,
        StepKind::Weak => vx.label == Label::WhyNot && vx.inputs.is_empty(),
        _ => false,
    };
    ok.then(|| remove_root(r, b.root))
}

/// Cut cells of the root whose first input has the step's formula; each
/// choice opens into two conclusions at the end of the block.
fn cut(r: &Qps, step: &Step) -> Vec<Qps> {
    let a = step.cut.as_ref().expect("typed cut carries a formula");
    let Some(b) = block_at(r, step.i - 1) else { return vec![] };
    r.vertices_in(b.root)
        .into_iter()
        .filter(|&v| r.label(v) == Label::Cut && r.ty(r.graph.vertices[v].inputs[0]) == a)
        .map(|v| {
            let ins = r.graph.vertices[v].inputs.clone();
            let opened = [partner(r, ins[0]), partner(r, ins[1])];
            let mut d = Draft::new(r.clone());
            d.remove_vertex(v);
            let mut tails = r.conclusions().to_vec();
            splice_tails(&mut tails, step.i - 1, 0, &opened);
            d.set_tails(tails);
            d.finish()
        })
        .collect()
}

fn binary(r: &Qps, step: &Step) -> Option<Qps> {
    let t = r.conclusion(step.i)?;
    let v = r.vertex_of(t);
    let want = if step.kind == StepKind::Tensor { Label::Tensor } else { Label::Par };
    if r.label(v) != want {
        return None;
    }
    let ins = r.graph.vertices[v].inputs.clone();
    let opened = [partner(r, ins[0]), partner(r, ins[1])];
    let mut d = Draft::new(r.clone());
    d.remove_vertex(v);
    let mut tails = r.conclusions().to_vec();
    splice_tails(&mut tails, step.i - 1, 1, &opened);
    d.set_tails(tails);
    Some(d.finish())
}

/// Move the inputs not in `keep` of the `?`-cell at conclusion `i` to a
/// fresh `?`-cell whose output becomes conclusion `i + 1`.
pub(crate) fn split_why_not(q: &Qps, i: usize, keep: &[FlagId]) -> Qps {
    let t = q.conclusion(i).expect("position in range");
    let v = q.vertex_of(t);
    let mut d = Draft::new(q.clone());
    let w = d.add_vertex(Label::WhyNot, q.boxes[v], &[], &[q.ty(t).clone()]);
    for &f in &q.graph.vertices[v].inputs {
        if !keep.contains(&f) {
            d.move_input(f, w);
        }
    }
    let mut tails = q.conclusions().to_vec();
    let out = d.q.graph.vertices[w].outputs[0];
    splice_tails(&mut tails, i, 0, &[out]);
    d.set_tails(tails);
    d.finish()
}

/// Order-preserving splits of at least two inputs into two nonempty parts;
/// with an annotation `(h, k)`, only the first `h + 1` against the rest.
fn contraction(r: &Qps, step: &Step) -> Vec<Qps> {
    let Some(t) = r.conclusion(step.i) else { return vec![] };
    let v = r.vertex_of(t);
    let ins = r.graph.vertices[v].inputs.clone();
    if !is_why_not(r, v) || ins.len() < 2 {
        return vec![];
    }
    if let Some((h, k)) = step.split {
        if h + k + 2 != ins.len() {
            return vec![];
        }
        return vec![split_why_not(r, step.i, &ins[..=h])];
    }
    let n = ins.len();
    (1u64..(1 << n) - 1)
        .map(|mask| {
            let keep: Vec<FlagId> = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| ins[b]).collect();
            split_why_not(r, step.i, &keep)
        })
        .collect()
}

/// A unary `?`-cell whose input comes from its own level.
fn dereliction(r: &Qps, i: usize) -> Option<Qps> {
    let t = r.conclusion(i)?;
    let v = r.vertex_of(t);
    let ins = &r.graph.vertices[v].inputs;
    if !is_why_not(r, v) || ins.len() != 1 {
        return None;
    }
    let p = partner(r, ins[0]);
    if r.boxes[r.vertex_of(p)] != r.boxes[v] {
        return None;
    }
    let mut d = Draft::new(r.clone());
    d.remove_vertex(v);
    let mut tails = r.conclusions().to_vec();
    tails[i - 1] = p;
    d.set_tails(tails);
    Some(d.finish())
}

/// The root holds only the `!`-door at `i` and `?`-cells at the other
/// conclusions of the block, and exactly one box: dissolve the box.
fn open_box(r: &Qps, i: usize) -> Option<Qps> {
    let b = block_at(r, i)?;
    let t = r.conclusion(i)?;
    let door = r.vertex_of(t);
    let dx = &r.graph.vertices[door];
    if r.label(door) != Label::OfCourse || dx.inputs.len() != 1 {
        return None;
    }
    let p = partner(r, dx.inputs[0]);
    let inner = r.boxes[r.vertex_of(p)];
    if r.forest.children(b.root) != vec![inner] {
        return None;
    }
    let at_root = r.vertices_in(b.root);
    let mut frontier: Vec<VertexId> = b.tails.iter().map(|&f| r.vertex_of(f)).collect();
    frontier.sort_unstable();
    frontier.dedup();
    if frontier.len() != b.tails.len() || at_root.len() != frontier.len() {
        return None;
    }
    if frontier.iter().any(|&v| v != door && !is_why_not(r, v)) {
        return None;
    }
    let mut d = Draft::new(r.clone());
    d.remove_vertex(door);
    for v in r.vertices_in(inner) {
        d.set_box(v, b.root);
    }
    for c in r.forest.children(inner) {
        d.set_parent(c, Some(b.root));
    }
    d.remove_node(inner);
    let mut tails = r.conclusions().to_vec();
    tails[i - 1] = p;
    d.set_tails(tails);
    Some(d.finish())
}

/// The unique structure of type `src` that `step` sends to `rp`.
pub fn reverse_mell(rp: &Qps, step: &Step, src: &Context) -> Result<Qps, RewriteError> {
    let target = step.apply_type(src)?;
    let found = rp.type_of();
    if found != target {
        return Err(RewriteError::TypeMismatch { step: step.clone(), expected: target, found });
    }
    let irreversible = |reason: &str| RewriteError::Irreversible { step: step.clone(), reason: reason.into() };
    let i = step.i;
    let at = |p: usize| src.at(p).expect("typed position").clone();
    let q = match step.kind {
        StepKind::Exc => exchange(rp, i),
        StepKind::Mix => merge_roots(rp, i).ok_or_else(|| irreversible("conclusions i and i+1 share a root"))?,
        StepKind::Ax => new_block(rp, i, Label::Ax, &[at(i), at(i + 1)]),
        StepKind::One => new_block(rp, i, Label::One, &[Formula::One]),
        StepKind::Bot => new_block(rp, i, Label::Bot, &[Formula::Bot]),
        StepKind::Weak => new_block(rp, i, Label::WhyNot, &[at(i)]),
        StepKind::Dai => {
            let (k, _) = src.locate(i).expect("typed position");
            new_block(rp, src.block_start(k), Label::Daimon, &src.blocks[k])
        }
        StepKind::Cut => {
            let (ta, tb) = (conclusion(rp, i), conclusion(rp, i + 1));
            let a = rp.ty(ta).clone();
            let root = rp.boxes[rp.vertex_of(ta)];
            let mut d = Draft::new(rp.clone());
            let c = d.add_vertex(Label::Cut, root, &[a.clone(), a.dual()], &[]);
            let ins = d.q.graph.vertices[c].inputs.clone();
            d.glue(ta, ins[0]);
            d.glue(tb, ins[1]);
            let mut tails = rp.conclusions().to_vec();
            splice_tails(&mut tails, i - 1, 2, &[]);
            d.set_tails(tails);
            d.finish()
        }
        StepKind::Tensor | StepKind::Par => {
            let (ta, tb) = (conclusion(rp, i), conclusion(rp, i + 1));
            let label = if step.kind == StepKind::Tensor { Label::Tensor } else { Label::Par };
            let root = rp.boxes[rp.vertex_of(ta)];
            let mut d = Draft::new(rp.clone());
            let c = d.add_vertex(label, root, &[rp.ty(ta).clone(), rp.ty(tb).clone()], &[at(i)]);
            let (ins, out) = (d.q.graph.vertices[c].inputs.clone(), d.q.graph.vertices[c].outputs[0]);
            d.glue(ta, ins[0]);
            d.glue(tb, ins[1]);
            let mut tails = rp.conclusions().to_vec();
            splice_tails(&mut tails, i - 1, 2, &[out]);
            d.set_tails(tails);
            d.finish()
        }
        StepKind::Contr => {
            let (v, w) = (rp.vertex_of(conclusion(rp, i)), rp.vertex_of(conclusion(rp, i + 1)));
            if !is_why_not(rp, v) || !is_why_not(rp, w) {
                return Err(irreversible("conclusions i and i+1 are not both outputs of ?-cells"));
            }
            let mut d = Draft::new(rp.clone());
            for &f in &rp.graph.vertices[w].inputs {
                d.move_input(f, v);
            }
            d.remove_vertex(w);
            let mut tails = rp.conclusions().to_vec();
            splice_tails(&mut tails, i, 1, &[]);
            d.set_tails(tails);
            d.finish()
        }
        StepKind::Der => {
            let ta = conclusion(rp, i);
            let root = rp.boxes[rp.vertex_of(ta)];
            let mut d = Draft::new(rp.clone());
            let c = d.add_vertex(Label::WhyNot, root, &[rp.ty(ta).clone()], &[at(i)]);
            let (inp, out) = (d.q.graph.vertices[c].inputs[0], d.q.graph.vertices[c].outputs[0]);
            d.glue(ta, inp);
            let mut tails = rp.conclusions().to_vec();
            tails[i - 1] = out;
            d.set_tails(tails);
            d.finish()
        }
        StepKind::Box => {
            let b = block_at(rp, i).expect("typed position");
            let frontier: Vec<VertexId> =
                b.positions().filter(|&p| p != i).map(|p| rp.vertex_of(conclusion(rp, p))).collect();
            if frontier.iter().any(|&v| !is_why_not(rp, v)) {
                return Err(irreversible("a ?-formula of the block is not the output of a ?-cell"));
            }
            let ta = conclusion(rp, i);
            let mut d = Draft::new(rp.clone());
            let top = d.add_node(None);
            d.set_parent(b.root, Some(top));
            for v in frontier {
                d.set_box(v, top);
            }
            let c = d.add_vertex(Label::OfCourse, top, &[rp.ty(ta).clone()], &[at(i)]);
            let (inp, out) = (d.q.graph.vertices[c].inputs[0], d.q.graph.vertices[c].outputs[0]);
            d.glue(ta, inp);
            let mut tails = rp.conclusions().to_vec();
            tails[i - 1] = out;
            d.set_tails(tails);
            d.finish()
        }
    };
    Ok(q)
}

fn conclusion(q: &Qps, i: usize) -> FlagId {
    q.conclusion(i).expect("typed position")
}

/// A new root with one input-free cell whose outputs become conclusions
/// starting at position `i`.
fn new_block(q: &Qps, i: usize, label: Label, outputs: &[Formula]) -> Qps {
    let mut d = Draft::new(q.clone());
    let root = d.add_node(None);
    let c = d.add_vertex(label, root, &[], outputs);
    let outs = d.q.graph.vertices[c].outputs.clone();
    let mut tails = q.conclusions().to_vec();
    splice_tails(&mut tails, i - 1, 0, &outs);
    d.set_tails(tails);
    d.finish()
}

/// Follow `path` from `r`, taking the first result of every step.
pub fn replay_mell(r: &Qps, path: &[Step]) -> Result<Vec<Qps>, ReplayError> {
    let mut frames = vec![r.clone()];
    for (index, s) in path.iter().enumerate() {
        let cur = frames.last().expect("nonempty");
        let next = apply_mell(cur, s).map_err(|e| ReplayError::Rewrite { index, error: e })?;
        frames.push(next.into_iter().next().ok_or(ReplayError::Blocked { index, step: s.clone() })?);
    }
    Ok(frames)
}

/// Rebuild the source of `path` from its final structure, step by step
/// backwards; returns every intermediate frame, the source first.
pub fn reverse_replay(end: &Qps, path: &[Step], src: &Context) -> Result<Vec<Qps>, ReplayError> {
    let ctxs = super::step::path_contexts(path, src).map_err(|e| ReplayError::Rewrite {
        index: e.index,
        error: RewriteError::Type(e.error),
    })?;
    let mut frames = vec![end.clone()];
    for index in (0..path.len()).rev() {
        let cur = frames.last().expect("nonempty");
        let prev = reverse_mell(cur, &path[index], &ctxs[index]).map_err(|error| ReplayError::Rewrite { index, error })?;
        frames.push(prev);
    }
    frames.reverse();
    Ok(frames)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("step {index}: {error}")]
    Rewrite { index: usize, error: RewriteError },
    #[error("step {index} ({step}) does not apply")]
    Blocked { index: usize, step: Step },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::step::parse_path;
    use crate::structure::{is_iso, size_measure, validate_classify, AxiomMode, Builder};

    fn steps(s: &str) -> Vec<Step> {
        parse_path(s).unwrap()
    }

    /// The cut-free proof of the syllogism formula, built by hand.
    fn syllogism() -> Qps {
        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let ax_x = b.cell(Label::Ax, r, &[], &["X", "X^"]);
        let ax_y = b.cell(Label::Ax, r, &[], &["Y^", "Y"]);
        let ax_z = b.cell(Label::Ax, r, &[], &["Z^", "Z"]);
        let t1 = b.cell(Label::Tensor, r, &["X", "Y^"], &["(X*Y^)"]);
        let t2 = b.cell(Label::Tensor, r, &["Y", "Z^"], &["(Y*Z^)"]);
        let p3 = b.cell(Label::Par, r, &["X^", "Z"], &["(X^|Z)"]);
        let p2 = b.cell(Label::Par, r, &["(Y*Z^)", "(X^|Z)"], &["((Y*Z^)|(X^|Z))"]);
        let p1 = b.cell(Label::Par, r, &["(X*Y^)", "((Y*Z^)|(X^|Z))"], &["((X*Y^)|((Y*Z^)|(X^|Z)))"]);
        b.wire(ax_x, 0, t1, 0);
        b.wire(ax_y, 0, t1, 1);
        b.wire(ax_y, 1, t2, 0);
        b.wire(ax_z, 0, t2, 1);
        b.wire(ax_x, 1, p3, 0);
        b.wire(ax_z, 1, p3, 1);
        b.wire(t2, 0, p2, 0);
        b.wire(p3, 0, p2, 1);
        b.wire(t1, 0, p1, 0);
        b.wire(p2, 0, p1, 1);
        b.conclude(&[b.out(p1, 0)]);
        b.finish()
    }

    #[test]
    fn syllogism_path_reaches_empty() {
        let path = steps("par@1 par@2 par@3 tensor@1 tensor@3 exc@1 exc@2 mix@2 ax@1 exc@2 mix@2 ax@1 ax@1");
        let r = syllogism();
        let frames = replay_mell(&r, &path).unwrap();
        assert!(frames.last().unwrap().is_empty());
        for f in &frames {
            assert!(validate_classify(f).unwrap().mell_star);
        }
        let back = reverse_replay(&Qps::empty(AxiomMode::Atomic), &path, &r.type_of()).unwrap();
        assert!(is_iso(&back[0], &r));
        for (a, b) in frames.iter().zip(&back) {
            assert!(is_iso(a, b));
        }
    }

    #[test]
    fn lone_axiom_is_removed() {
        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let a = b.cell(Label::Ax, r, &[], &["X^", "X"]);
        b.conclude(&[b.out(a, 0), b.out(a, 1)]);
        let out = apply_mell(&b.finish(), &Step::new(StepKind::Ax, 1)).unwrap();
        assert_eq!(out.len(), 1);
        assert!(out[0].is_empty());
    }

    /// `?⊥` fed by a boxed `⊥` whose box has a `!1` door.
    fn boxed_bot() -> Qps {
        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let inner = b.child(r);
        let bot = b.cell(Label::Bot, inner, &[], &["bot"]);
        let one = b.cell(Label::One, inner, &[], &["1"]);
        let w = b.cell(Label::WhyNot, r, &["bot"], &["?bot"]);
        let door = b.cell(Label::OfCourse, r, &["1"], &["!1"]);
        b.wire(bot, 0, w, 0);
        b.wire(one, 0, door, 0);
        b.conclude(&[b.out(w, 0), b.out(door, 0)]);
        b.finish()
    }

    #[test]
    fn dereliction_blocked_across_a_border() {
        let r = boxed_bot();
        assert!(validate_classify(&r).unwrap().mell);
        assert!(apply_mell(&r, &Step::new(StepKind::Der, 1)).unwrap().is_empty());
        // Opening the box first unblocks it.
        let opened = apply_mell(&r, &Step::new(StepKind::Box, 2)).unwrap();
        assert_eq!(opened.len(), 1);
        assert_eq!(opened[0].type_of().to_string(), "?bot,1");
        assert_eq!(apply_mell(&opened[0], &Step::new(StepKind::Der, 1)).unwrap().len(), 1);
    }

    #[test]
    fn type_mismatch_is_an_error() {
        let r = boxed_bot();
        assert!(matches!(apply_mell(&r, &Step::new(StepKind::Tensor, 1)), Err(RewriteError::Type(_))));
        let src: Context = "?bot,!1".parse().unwrap();
        assert!(matches!(
            reverse_mell(&r, &Step::new(StepKind::Der, 1), &src),
            Err(RewriteError::TypeMismatch { .. })
        ));
    }

    #[test]
    fn contraction_splits_in_order() {
        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let w = b.cell(Label::WhyNot, r, &[], &["?bot"]);
        for _ in 0..3 {
            let x = b.cell(Label::Bot, r, &[], &["bot"]);
            b.feed(x, 0, w);
        }
        b.conclude(&[b.out(w, 0)]);
        let q = b.finish();
        // Six nonempty proper subsets, two iso classes (1+2 and 2+1).
        let all = apply_mell(&q, &Step::new(StepKind::Contr, 1)).unwrap();
        assert_eq!(all.len(), 2);
        let one = apply_mell(&q, &Step::contr_split(1, 0, 1)).unwrap();
        assert_eq!(one.len(), 1);
        assert!(size_measure(&one[0]) < size_measure(&q));
        assert!(apply_mell(&q, &Step::contr_split(1, 1, 1)).unwrap().is_empty());
        let src = q.type_of();
        assert!(is_iso(&reverse_mell(&one[0], &Step::contr_split(1, 0, 1), &src).unwrap(), &q));
    }

    #[test]
    fn cut_opens_and_reverse_closes() {
        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let o = b.cell(Label::One, r, &[], &["1"]);
        let a = b.cell(Label::Ax, r, &[], &["X", "X^"]);
        let c = b.cell(Label::Cut, r, &["X", "X^"], &[]);
        b.wire(a, 0, c, 0);
        b.wire(a, 1, c, 1);
        b.conclude(&[b.out(o, 0)]);
        let q = b.finish();
        let out = apply_mell(&q, &Step::cut(2, "X".parse().unwrap())).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].type_of().to_string(), "1,X,X^");
        // The cut formula must be the first input's type.
        assert!(apply_mell(&q, &Step::cut(2, "X^".parse().unwrap())).unwrap().is_empty());
        let back = reverse_mell(&out[0], &Step::cut(2, "X".parse().unwrap()), &q.type_of()).unwrap();
        assert!(is_iso(&back, &q));
    }

    #[test]
    fn mix_splits_and_merges() {
        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let o = b.cell(Label::One, r, &[], &["1"]);
        let x = b.cell(Label::Bot, r, &[], &["bot"]);
        b.conclude(&[b.out(o, 0), b.out(x, 0)]);
        let q = b.finish();
        let out = apply_mell(&q, &Step::new(StepKind::Mix, 1)).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].type_of().to_string(), "1;bot");
        let back = reverse_mell(&out[0], &Step::new(StepKind::Mix, 1), &q.type_of()).unwrap();
        assert!(is_iso(&back, &q));
        // A connected block does not split.
        let r = boxed_bot();
        assert!(apply_mell(&r, &Step::new(StepKind::Mix, 1)).unwrap().is_empty());
    }

    #[test]
    fn reverse_box_needs_why_not_cells() {
        let mut b = Builder::new(AxiomMode::Eta);
        let r = b.root();
        let a = b.cell(Label::Ax, r, &[], &["!X^", "?X"]);
        b.conclude(&[b.out(a, 1), b.out(a, 0)]);
        let q = b.finish();
        let src: Context = "?X,!!X^".parse().unwrap();
        assert!(matches!(
            reverse_mell(&q, &Step::new(StepKind::Box, 2), &src),
            Err(RewriteError::Irreversible { .. })
        ));
    }
}
