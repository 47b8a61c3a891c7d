//! Memoized depth-first search for a path from a set of resource structures
//! to `{ε}` within a bound on its cost.
//!
//! A set with several blocks is glueable exactly when each per-block
//! projection is, so states are single-block sets and the blocks of a set
//! are solved independently, the last one first. Safe moves (a lone
//! hypothesis, a multiplicative conclusion, a set of daimons, detaching a
//! part without exponential cells, closing a box-free block) are forced;
//! the others branch. Cost is the number of rule steps; exchanges are free.

use std::collections::HashMap;
use std::rc::Rc;

use crate::formula::Formula;
use crate::graph::{Label, UnionFind, VertexId};
use crate::rewrite::{apply_dill_set, exchanges_to_end, find_termination_path, lone_vertex, pieces, DillConfig, HashedSet, Step, StepKind};
use crate::structure::{is_iso, Qps};

use super::replay_sets;
use crate::taylor::daimon_component;

/// Number of rule steps of a path.
pub fn cost(path: &[Step]) -> usize {
    path.iter().filter(|s| s.kind != StepKind::Exc).count()
}

/// What is known about a state.
#[derive(Default)]
struct Entry {
    /// A path found for this state.
    path: Option<Rc<Vec<Step>>>,
    /// No path costs at most this much.
    failed: Option<usize>,
    /// No path at all: a search failed without hitting the bound.
    dead: bool,
}

/// Result of a bounded search.
pub(crate) enum Outcome<T> {
    Found(T),
    /// Failed, but only because of the bound.
    Cutoff,
    /// Failed regardless of the bound.
    Dead,
}

impl<T> Outcome<T> {
    pub fn found(self) -> Option<T> {
        match self {
            Outcome::Found(x) => Some(x),
            _ => None,
        }
    }
}

type Bucket = Vec<(HashedSet, Entry)>;

pub(crate) struct Search {
    dill: DillConfig,
    cuts: Vec<Formula>,
    memo: HashMap<Vec<u64>, Bucket>,
}

impl Search {
    pub fn new(dill: DillConfig, cuts: Vec<Formula>) -> Search {
        Search { dill, cuts, memo: HashMap::new() }
    }

    /// The first path found of cost at most `budget` from `set` (all elements of
    /// one type) to `{ε}`.
    pub fn solve(&mut self, set: &[Qps], budget: usize) -> Outcome<Vec<Step>> {
        let Some(ctx) = set.first().map(Qps::type_of) else { return Outcome::Dead };
        if ctx.is_empty() {
            return Outcome::Found(vec![]);
        }
        let comps: Vec<Vec<Qps>> = set.iter().map(Qps::components).collect();
        let mut remaining = budget;
        let mut path = vec![];
        for j in (0..ctx.blocks.len()).rev() {
            let block: Vec<Qps> = comps.iter().map(|c| c[j].clone()).collect();
            let sub = match self.solve_block(block, remaining) {
                Outcome::Found(p) => p,
                Outcome::Cutoff => return Outcome::Cutoff,
                Outcome::Dead => return Outcome::Dead,
            };
            remaining -= cost(&sub);
            let off = ctx.block_start(j) - 1;
            path.extend(sub.iter().map(|s| Step { i: s.i + off, ..s.clone() }));
        }
        Outcome::Found(path)
    }

    fn solve_block(&mut self, set: Vec<Qps>, budget: usize) -> Outcome<Rc<Vec<Step>>> {
        let set = HashedSet::new(set);
        if let Some(e) = self.lookup(&set) {
            if e.dead {
                return Outcome::Dead;
            }
            if let Some(p) = e.path.as_ref().filter(|p| cost(p) <= budget) {
                return Outcome::Found(p.clone());
            }
            if e.failed.is_some_and(|b| budget <= b) {
                return Outcome::Cutoff;
            }
        }
        let found = self.expand(&set.items, budget);
        let bucket = self.memo.entry(set.hashes.clone()).or_default();
        let k = match bucket.iter().position(|(s, _)| s.same(&set)) {
            Some(k) => k,
            None => {
                bucket.push((set, Entry::default()));
                bucket.len() - 1
            }
        };
        let e = &mut bucket[k].1;
        match &found {
            Outcome::Found(p) => {
                if e.path.as_ref().is_none_or(|q| cost(p) < cost(q)) {
                    e.path = Some(p.clone());
                }
            }
            Outcome::Cutoff => e.failed = Some(e.failed.map_or(budget, |b| b.max(budget))),
            Outcome::Dead => e.dead = true,
        }
        found
    }

    fn lookup(&self, set: &HashedSet) -> Option<&Entry> {
        self.memo.get(&set.hashes)?.iter().find(|(s, _)| s.same(set)).map(|(_, e)| e)
    }

    fn expand(&mut self, set: &[Qps], budget: usize) -> Outcome<Rc<Vec<Step>>> {
        if set.iter().all(Qps::is_empty) {
            return Outcome::Found(Rc::new(vec![]));
        }
        if let Some(out) = self.close_box_free(set, budget) {
            return out;
        }
        if !copy_counts_consistent(set) {
            return Outcome::Dead;
        }
        let Some(moves) = self.moves(set) else { return Outcome::Dead };
        if budget == 0 {
            return Outcome::Cutoff;
        }
        let mut cut = false;
        for mv in moves {
            let alts = self.apply_move(set, &mv);
            for alt in alts {
                match self.solve(&alt, budget - 1) {
                    Outcome::Found(rest) => {
                        let mut path = mv.clone();
                        path.extend(rest);
                        return Outcome::Found(Rc::new(path));
                    }
                    Outcome::Cutoff => cut = true,
                    Outcome::Dead => {}
                }
            }
        }
        if cut {
            Outcome::Cutoff
        } else {
            Outcome::Dead
        }
    }

    /// A block whose non-daimon elements have no `!`-cell comes from a
    /// box-free component, whose expansion is that component alone: the
    /// elements must all be isomorphic, and the path is the component's
    /// termination path, whose cost does not depend on the choices made.
    fn close_box_free(&self, set: &[Qps], budget: usize) -> Option<Outcome<Rc<Vec<Step>>>> {
        let ne = concrete(set);
        let first = *ne.first()?;
        let has_of_course = |q: &Qps| (0..q.graph.vertices.len()).any(|v| q.label(v) == Label::OfCourse);
        if ne.iter().any(|q| has_of_course(q)) {
            return None;
        }
        if ne.iter().any(|q| !is_iso(q, first)) {
            return Some(Outcome::Dead);
        }
        let path = find_termination_path(first).ok()?;
        if cost(&path) > budget {
            return Some(Outcome::Cutoff);
        }
        // Daimon elements must follow the same path.
        replay_sets(set, &path, &self.dill)?;
        Some(Outcome::Found(Rc::new(path)))
    }

    /// The sets reached by a move: exchanges then one rule.
    fn apply_move(&self, set: &[Qps], mv: &[Step]) -> Vec<Vec<Qps>> {
        let (last, prefix) = mv.split_last().expect("a move ends with a rule");
        // Exchanges only reorder conclusions.
        let mut cur = set.to_vec();
        for q in &mut cur {
            for s in prefix {
                q.graph.tails.swap(s.i - 1, s.i);
            }
        }
        let mut alts = apply_dill_set(&cur, last, &self.dill).unwrap_or_default();
        if last.kind == StepKind::Contr {
            // A half with no input in any non-daimon element only delays a
            // weakening; a cheaper path never needs it.
            alts.retain(|alt| {
                let ne = concrete(alt);
                [last.i, last.i + 1].iter().all(|&p| ne.iter().map(|q| arity(q, p)).sum::<usize>() > 0)
            });
        }
        alts
    }

    /// Candidate moves on a single-block set, `None` when the set is stuck.
    fn moves(&self, set: &[Qps]) -> Option<Vec<Vec<Step>>> {
        let len = set[0].type_of().len();
        let ne = concrete(set);
        let Some(first) = ne.first() else { return Some(vec![vec![Step::new(StepKind::Dai, 1)]]) };
        let labels: Vec<Label> = (1..=len).map(|p| label_at(first, p)).collect();
        if ne.iter().any(|q| (1..=len).any(|p| label_at(q, p) != labels[p - 1])) {
            return None;
        }
        for q in &ne {
            let Some(v) = lone_vertex(q, root(q)) else { continue };
            let kind = match q.label(v) {
                Label::Ax => StepKind::Ax,
                Label::One => StepKind::One,
                Label::Bot => StepKind::Bot,
                Label::WhyNot if q.graph.vertices[v].inputs.is_empty() => StepKind::Weak,
                _ => continue,
            };
            return Some(vec![vec![Step::new(kind, 1)]]);
        }
        if let Some(p) = labels.iter().position(|l| matches!(l, Label::Tensor | Label::Par)) {
            let kind = if labels[p] == Label::Tensor { StepKind::Tensor } else { StepKind::Par };
            return Some(vec![vec![Step::new(kind, p + 1)]]);
        }
        let classes = Classes::new(&ne, len);
        if let Some(mv) = classes.forced(len) {
            return Some(vec![mv]);
        }
        let is = |p: usize, l: Label| labels[p - 1] == l;
        let arity_sum = |p: usize| ne.iter().map(|q| arity(q, p)).sum::<usize>();
        let mut out = vec![];
        for p in 1..=len {
            if is(p, Label::OfCourse) && (1..=len).all(|k| k == p || is(k, Label::WhyNot)) {
                out.push(vec![Step::new(StepKind::Box, p)]);
            }
        }
        out.extend(classes.box_preparations(&labels));
        let contractions = (1..=len).filter(|&p| is(p, Label::WhyNot) && arity_sum(p) >= 2);
        out.extend(contractions.map(|p| vec![Step::new(StepKind::Contr, p)]));
        // Dereliction of a hypothesis can wait until the block is box-free.
        for p in 1..=len {
            if is(p, Label::WhyNot) && ne.iter().all(|q| arity(q, p) == 1 && !fed_by_hypothesis(q, p)) {
                out.push(vec![Step::new(StepKind::Der, p)]);
            }
        }
        let mut cuts: Vec<Formula> = vec![];
        for q in &ne {
            for v in q.vertices_in(root(q)).into_iter().filter(|&v| q.label(v) == Label::Cut) {
                let a = q.ty(q.graph.vertices[v].inputs[0]).clone();
                if !cuts.contains(&a) {
                    cuts.push(a);
                }
            }
        }
        for a in &self.cuts {
            if !cuts.contains(a) {
                cuts.push(a.clone());
            }
        }
        out.extend(cuts.into_iter().map(|a| vec![Step::cut(len + 1, a)]));
        Some(out)
    }
}

/// Elements of a single-block set that are not a lone daimon.
fn concrete(set: &[Qps]) -> Vec<&Qps> {
    set.iter().filter(|q| !q.is_empty() && daimon_component(q, root(q)).is_none()).collect()
}

fn root(q: &Qps) -> usize {
    q.blocks()[0].0
}

fn label_at(q: &Qps, p: usize) -> Label {
    q.label(q.vertex_of(q.conclusion(p).expect("typed position")))
}

/// A necessary condition when every `!`-cell of the non-daimon elements is
/// a conclusion. The witness then has no nested boxes, so a `?`-conclusion
/// has `r` inputs from root cells and `m_i` from each copy of box `i`, the
/// same numbers for every element: its arity in an element whose `!`-cell
/// `i` has `c_i` inputs is `r + Σ m_i c_i`.
fn copy_counts_consistent(set: &[Qps]) -> bool {
    let ne = concrete(set);
    let Some(first) = ne.first() else { return true };
    let len = first.conclusions().len();
    let labels: Vec<Label> = (1..=len).map(|p| label_at(first, p)).collect();
    let doors: Vec<usize> = (1..=len).filter(|&p| labels[p - 1] == Label::OfCourse).collect();
    let all_doors_are_conclusions = ne.iter().all(|q| {
        (0..q.graph.vertices.len()).filter(|&v| q.label(v) == Label::OfCourse).count() == doors.len()
    });
    if doors.is_empty() || !all_doors_are_conclusions {
        return true;
    }
    let copies: Vec<Vec<usize>> = ne.iter().map(|q| doors.iter().map(|&d| input_count(q, d)).collect()).collect();
    (1..=len).filter(|&p| labels[p - 1] == Label::WhyNot).all(|p| {
        let arities: Vec<usize> = ne.iter().map(|q| arity(q, p)).collect();
        let rows: Vec<(usize, &[usize])> = arities.iter().copied().zip(copies.iter().map(Vec::as_slice)).collect();
        has_nonnegative_solution(&rows, doors.len())
    })
}

/// Whether some `r, m_1..m_k ≥ 0` satisfy `a = r + Σ m_i c_i` on every row `(a, c)`.
fn has_nonnegative_solution(rows: &[(usize, &[usize])], k: usize) -> bool {
    fn go(rows: &[(usize, &[usize])], k: usize, i: usize, rest: &mut Vec<usize>) -> bool {
        if i == k {
            // The remainders must all equal the same r.
            return rest.windows(2).all(|w| w[0] == w[1]);
        }
        let cap = rows.iter().zip(rest.iter()).filter(|((_, c), _)| c[i] > 0).map(|((_, c), &r)| r / c[i]).min();
        for m in 0..=cap.unwrap_or(0) {
            for (row, r) in rows.iter().zip(rest.iter_mut()) {
                *r -= m * row.1[i];
            }
            let ok = go(rows, k, i + 1, rest);
            for (row, r) in rows.iter().zip(rest.iter_mut()) {
                *r += m * row.1[i];
            }
            if ok {
                return true;
            }
        }
        false
    }
    let mut rest: Vec<usize> = rows.iter().map(|r| r.0).collect();
    go(rows, k, 0, &mut rest)
}

fn input_count(q: &Qps, p: usize) -> usize {
    q.graph.vertices[q.vertex_of(q.conclusion(p).expect("typed position"))].inputs.len()
}

/// The `?`-cell at conclusion `p` has an input from an input-free cell.
fn fed_by_hypothesis(q: &Qps, p: usize) -> bool {
    let v = q.vertex_of(q.conclusion(p).expect("typed position"));
    q.graph.vertices[v].inputs.iter().any(|&i| q.source(i).is_some_and(|s| q.graph.vertices[s].inputs.is_empty()))
}

/// Number of inputs of the `?`-cell at conclusion `p`, 0 for any other cell.
fn arity(q: &Qps, p: usize) -> usize {
    let v = q.vertex_of(q.conclusion(p).expect("typed position"));
    if q.label(v) == Label::WhyNot {
        q.graph.vertices[v].inputs.len()
    } else {
        0
    }
}

/// Positions grouped by the pieces of the non-daimon elements: two
/// positions share a class when some element connects them. A class is
/// exponential when one of its pieces holds a `?`- or `!`-cell somewhere.
struct Classes {
    of: Vec<usize>,
    members: Vec<Vec<usize>>,
    exponential: Vec<bool>,
}

impl Classes {
    fn new(ne: &[&Qps], len: usize) -> Classes {
        let mut uf = UnionFind::new(len);
        let mut exp_pos = vec![false; len];
        for q in ne {
            for piece in pieces(q, root(q), &[]) {
                let pos = piece_positions(q, &piece);
                for w in pos.windows(2) {
                    uf.union(w[0] - 1, w[1] - 1);
                }
                if piece.iter().any(|&v| matches!(q.label(v), Label::WhyNot | Label::OfCourse)) {
                    for &p in &pos {
                        exp_pos[p - 1] = true;
                    }
                }
            }
        }
        let (of, count) = uf.labels();
        let mut members = vec![vec![]; count];
        let mut exponential = vec![false; count];
        for p in 1..=len {
            members[of[p - 1]].push(p);
            exponential[of[p - 1]] |= exp_pos[p - 1];
        }
        Classes { of, members, exponential }
    }

    /// The mix making `block` (a union of classes) one block and the other
    /// positions another, the block holding position 1 first.
    fn split(&self, block: &[usize], len: usize) -> Option<Vec<Step>> {
        if block.is_empty() || block.len() == len {
            return None;
        }
        let chosen: Vec<usize> =
            if block.contains(&1) { (1..=len).filter(|p| !block.contains(p)).collect() } else { block.to_vec() };
        let mut mv = exchanges_to_end(1, len, &chosen);
        mv.push(Step::new(StepKind::Mix, len - chosen.len()));
        Some(mv)
    }

    /// A class without exponential cells cannot be tied to the rest of the
    /// block through a box, so detaching it is safe.
    fn forced(&self, len: usize) -> Option<Vec<Step>> {
        let c = (0..self.members.len()).find(|&c| !self.exponential[c])?;
        self.split(&self.members[c], len)
    }

    /// Mixes that leave a `!`-conclusion alone with `?`-conclusions, ready
    /// for the box rule. Blocks are solved independently, so only the first
    /// `!`-conclusion that can be isolated is tried.
    fn box_preparations(&self, labels: &[Label]) -> Vec<Vec<Step>> {
        let len = labels.len();
        let only_why_not = |c: usize| self.members[c].iter().all(|&p| labels[p - 1] == Label::WhyNot);
        let mut out: Vec<Vec<Step>> = vec![];
        let isolable = |d: usize| {
            let cd = self.of[d - 1];
            labels[d - 1] == Label::OfCourse
                && self.members[cd].iter().all(|&p| p == d || labels[p - 1] == Label::WhyNot)
        };
        if let Some(d) = (1..=len).find(|&d| isolable(d)) {
            let cd = self.of[d - 1];
            let others: Vec<usize> = (0..self.members.len()).filter(|&c| c != cd && only_why_not(c)).collect();
            for mask in 0u64..(1 << others.len()) {
                let mut block = self.members[cd].clone();
                for (k, &c) in others.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        block.extend(&self.members[c]);
                    }
                }
                block.sort_unstable();
                if let Some(mv) = self.split(&block, len) {
                    if !out.contains(&mv) {
                        out.push(mv);
                    }
                }
            }
        }
        out
    }
}

fn piece_positions(q: &Qps, piece: &[VertexId]) -> Vec<usize> {
    let mut out: Vec<usize> =
        piece.iter().flat_map(|&v| q.graph.vertices[v].outputs.iter().filter_map(|&o| q.position(o))).collect();
    out.sort_unstable();
    out
}
