//! Finding a path to the empty structure, and synthesising the exchanges a
//! rule needs before it applies.

use thiserror::Error;

use crate::graph::{Label, VertexId};
use crate::structure::Qps;

use super::local::{lone_vertex, pieces};
use super::mell::apply_mell;
use super::step::{Step, StepKind};

/// Exchanges that move the conclusions at `chosen` (1-based, inside one
/// block starting at `start`) to the end of that block, keeping both groups
/// in order. Positions refer to the context before the exchanges.
pub fn exchanges_to_end(start: usize, end: usize, chosen: &[usize]) -> Vec<Step> {
    let mut keys: Vec<bool> = (start..=end).map(|p| chosen.contains(&p)).collect();
    let mut out = vec![];
    // Stable bubble sort of false before true.
    while let Some(k) = (0..keys.len().saturating_sub(1)).find(|&k| keys[k] && !keys[k + 1]) {
        keys.swap(k, k + 1);
        out.push(Step::new(StepKind::Exc, start + k));
    }
    out
}

/// Step sequences (exchanges then one rule) that apply to `r`, in the order
/// hypothesis, dereliction, multiplicatives, contraction, cut, box, mix.
pub fn applicable_steps(r: &Qps) -> Vec<Vec<Step>> {
    let mut tiers: [Vec<Vec<Step>>; 7] = Default::default();
    for (root, tails) in r.blocks() {
        let Some(&first) = tails.first() else { continue };
        let start = r.position(first).expect("tail");
        let end = start + tails.len() - 1;
        if let Some(v) = lone_vertex(r, root) {
            let kind = match (r.label(v), r.graph.vertices[v].inputs.is_empty()) {
                (Label::Ax, _) => Some(StepKind::Ax),
                (Label::One, _) => Some(StepKind::One),
                (Label::Bot, _) => Some(StepKind::Bot),
                (Label::WhyNot, true) => Some(StepKind::Weak),
                (Label::Daimon, _) => Some(StepKind::Dai),
                _ => None,
            };
            if let Some(k) = kind {
                tiers[0].push(vec![Step::new(k, start)]);
            }
        }
        for p in start..=end {
            let v = r.vertex_of(r.conclusion(p).expect("in range"));
            let ins = &r.graph.vertices[v].inputs;
            match r.label(v) {
                Label::WhyNot if ins.len() == 1 && r.source(ins[0]).is_some_and(|s| r.boxes[s] == r.boxes[v]) => {
                    tiers[1].push(vec![Step::new(StepKind::Der, p)])
                }
                Label::Tensor => tiers[2].push(vec![Step::new(StepKind::Tensor, p)]),
                Label::Par => tiers[2].push(vec![Step::new(StepKind::Par, p)]),
                Label::WhyNot if ins.len() >= 2 => tiers[3].push(vec![Step::contr_split(p, 0, ins.len() - 2)]),
                Label::OfCourse => tiers[5].push(vec![Step::new(StepKind::Box, p)]),
                _ => {}
            }
        }
        for v in r.vertices_in(root) {
            if r.label(v) == Label::Cut {
                let a = r.ty(r.graph.vertices[v].inputs[0]).clone();
                let s = Step::cut(end + 1, a);
                if !tiers[4].contains(&vec![s.clone()]) {
                    tiers[4].push(vec![s]);
                }
            }
        }
        if let Some(seq) = mix_sequence(r, root, start, end) {
            tiers[6].push(seq);
        }
    }
    // Box candidates only count when the rule really applies.
    tiers[5].retain(|seq| apply_mell(r, &seq[0]).is_ok_and(|v| !v.is_empty()));
    tiers.into_iter().flatten().collect()
}

/// Exchanges and a mix that detach the piece holding the block's last
/// conclusion, when the block has at least two pieces with conclusions.
fn mix_sequence(r: &Qps, root: usize, start: usize, end: usize) -> Option<Vec<Step>> {
    let ps = pieces(r, root, &[]);
    let positions = |p: &[VertexId]| -> Vec<usize> {
        let mut out: Vec<usize> =
            p.iter().flat_map(|&v| r.graph.vertices[v].outputs.iter().filter_map(|&o| r.position(o))).collect();
        out.sort_unstable();
        out
    };
    let with_tails = ps.iter().filter(|p| !positions(p).is_empty()).count();
    if with_tails < 2 {
        return None;
    }
    let last = ps.iter().find(|p| positions(p).contains(&end))?;
    let chosen = positions(last);
    let mut seq = exchanges_to_end(start, end, &chosen);
    seq.push(Step::new(StepKind::Mix, end - chosen.len()));
    Some(seq)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TerminationError {
    #[error("no rule applies to a structure of type {0}")]
    Stuck(crate::formula::Context),
}

/// A path from `r` to the empty structure, following [`applicable_steps`]
/// and the first result of every step.
pub fn find_termination_path(r: &Qps) -> Result<Vec<Step>, TerminationError> {
    let mut cur = r.clone();
    let mut path = vec![];
    while !cur.is_empty() {
        let seqs = applicable_steps(&cur);
        let Some(seq) = seqs.into_iter().next() else { return Err(TerminationError::Stuck(cur.type_of())) };
        for s in seq {
            cur = apply_mell(&cur, &s)
                .ok()
                .and_then(|v| v.into_iter().next())
                .ok_or_else(|| TerminationError::Stuck(cur.type_of()))?;
            path.push(s);
        }
    }
    Ok(path)
}
