//! Validation against the cell typing and the box-map conditions, and
//! classification into the MELL / resource families.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::formula::Formula;
use crate::graph::{FlagId, Label, NodeId, Orient, VertexId};

use super::{AxiomMode, Qps};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("malformed: {0}")]
    Malformed(String),
    #[error("flag {flag} is an input tail")]
    InputTail { flag: FlagId },
    #[error("vertex {vertex}: {reason}")]
    Typing { vertex: VertexId, reason: String },
    #[error("vertex {vertex}: axiom on a non-atomic formula in atomic mode")]
    NonAtomicAxiom { vertex: VertexId },
    #[error("edge at flag {flag} goes from a box to a node that is not an ancestor")]
    EdgeAgainstForest { flag: FlagId },
    #[error("edge at flag {flag} crosses a box border into vertex {vertex}, which is not a ?/! cell")]
    Border { vertex: VertexId, flag: FlagId },
    #[error("conclusion flag {flag} is not in a root")]
    ConclusionNotAtRoot { flag: FlagId },
    #[error("!-cell {vertex}: input at flag {flag} crosses more than one level")]
    OfCourseDeepInput { vertex: VertexId, flag: FlagId },
    #[error("forest node {node} is the box of more than one !-input")]
    OfCourseShared { node: NodeId },
    #[error("conclusions of root {node} are not contiguous (flag {flag})")]
    Contiguity { node: NodeId, flag: FlagId },
    #[error("root {node} has no conclusion")]
    RootWithoutConclusion { node: NodeId },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub mell_star: bool,
    pub mell: bool,
    pub dill0_star: bool,
    pub dill0: bool,
    pub proof_structure: bool,
}

pub fn validate_classify(q: &Qps) -> Result<Classification, Vec<Violation>> {
    let mut out = vec![];
    structural(q, &mut out);
    if !out.is_empty() {
        return Err(out);
    }
    typing(q, &mut out);
    boxes(q, &mut out);
    if !out.is_empty() {
        return Err(out);
    }
    Ok(classify(q))
}

fn structural(q: &Qps, out: &mut Vec<Violation>) {
    let g = &q.graph;
    let bad = |s: String, out: &mut Vec<Violation>| out.push(Violation::Malformed(s));
    if q.boxes.len() != g.vertices.len() {
        bad(format!("{} box entries for {} vertices", q.boxes.len(), g.vertices.len()), out);
        return;
    }
    if let Some(n) = q.forest.parent.iter().flatten().find(|&&p| p >= q.forest.len()) {
        bad(format!("parent {n} out of range"), out);
        return;
    }
    if !q.forest.is_acyclic() {
        bad("box-forest has a cycle".into(), out);
        return;
    }
    for (v, &b) in q.boxes.iter().enumerate() {
        if b >= q.forest.len() {
            bad(format!("vertex {v} boxed in missing node {b}"), out);
        }
    }
    for (i, f) in g.flags.iter().enumerate() {
        if f.vertex >= g.vertices.len() {
            bad(format!("flag {i} on missing vertex"), out);
            continue;
        }
        if let Some(p) = f.partner {
            if p >= g.flags.len() || g.flags[p].partner != Some(i) || p == i {
                bad(format!("flag {i}: partner is not an involution"), out);
            } else if g.flags[p].ty != f.ty {
                bad(format!("flag {i}: edge halves typed {} and {}", f.ty, g.flags[p].ty), out);
            } else if g.flags[p].orient == f.orient {
                bad(format!("flag {i}: edge halves share orientation"), out);
            }
        }
    }
    let mut listed = vec![0usize; g.flags.len()];
    for (v, vx) in g.vertices.iter().enumerate() {
        for (&f, want) in vx.inputs.iter().map(|f| (f, Orient::In)).chain(vx.outputs.iter().map(|f| (f, Orient::Out))) {
            if f >= g.flags.len() {
                bad(format!("vertex {v} lists missing flag {f}"), out);
                continue;
            }
            listed[f] += 1;
            if g.flags[f].vertex != v || g.flags[f].orient != want {
                bad(format!("vertex {v} lists flag {f} inconsistently"), out);
            }
        }
    }
    if let Some(f) = listed.iter().position(|&c| c != 1) {
        bad(format!("flag {f} listed {} times", listed[f]), out);
    }
    let mut seen = HashSet::new();
    for &t in &g.tails {
        if t >= g.flags.len() || !seen.insert(t) || g.flags[t].partner.is_some() {
            bad(format!("tail list entry {t} is not a distinct unglued flag"), out);
        }
    }
    for (i, f) in g.flags.iter().enumerate() {
        if f.partner.is_none() {
            match f.orient {
                Orient::In => out.push(Violation::InputTail { flag: i }),
                Orient::Out if !seen.contains(&i) => bad(format!("unglued output {i} missing from the tail list"), out),
                Orient::Out => {}
            }
        }
    }
}

fn typing(q: &Qps, out: &mut Vec<Violation>) {
    let g = &q.graph;
    for (v, vx) in g.vertices.iter().enumerate() {
        let ins: Vec<&Formula> = vx.inputs.iter().map(|&f| &g.flags[f].ty).collect();
        let outs: Vec<&Formula> = vx.outputs.iter().map(|&f| &g.flags[f].ty).collect();
        let err = |reason: String| Violation::Typing { vertex: v, reason };
        let arity = |ni: usize, no: usize| -> Option<Violation> {
            (ins.len() != ni || outs.len() != no).then(|| {
                err(format!("{} cell needs {ni} inputs and {no} outputs, has {} and {}", vx.label, ins.len(), outs.len()))
            })
        };
        let problem = match vx.label {
            Label::Ax => arity(0, 2).or_else(|| {
                if outs[0].dual() != *outs[1] {
                    Some(err(format!("axiom outputs {} and {} are not dual", outs[0], outs[1])))
                } else if q.mode == AxiomMode::Atomic && !outs[0].is_atomic() {
                    Some(Violation::NonAtomicAxiom { vertex: v })
                } else {
                    None
                }
            }),
            Label::Cut => arity(2, 0).or_else(|| {
                (ins[0].dual() != *ins[1]).then(|| err(format!("cut inputs {} and {} are not dual", ins[0], ins[1])))
            }),
            Label::One => arity(0, 1).or_else(|| (*outs[0] != Formula::One).then(|| err("1 cell output is not 1".into()))),
            Label::Bot => arity(0, 1).or_else(|| (*outs[0] != Formula::Bot).then(|| err("bot cell output is not bot".into()))),
            Label::Tensor | Label::Par => arity(2, 1).or_else(|| {
                let want = if vx.label == Label::Tensor {
                    Formula::tensor(ins[0].clone(), ins[1].clone())
                } else {
                    Formula::par(ins[0].clone(), ins[1].clone())
                };
                (*outs[0] != want).then(|| err(format!("output {} should be {want}", outs[0])))
            }),
            Label::WhyNot | Label::OfCourse => {
                if outs.len() != 1 {
                    Some(err(format!("{} cell needs one output", vx.label)))
                } else {
                    let body = if vx.label == Label::WhyNot { outs[0].why_not_body() } else { outs[0].of_course_body() };
                    match body {
                        None => Some(err(format!("output {} has the wrong modality", outs[0]))),
                        Some(a) => ins.iter().find(|&&t| t != a).map(|t| err(format!("input {t} should be {a}"))),
                    }
                }
            }
            Label::Daimon => (!ins.is_empty()).then(|| err("daimon cell has inputs".into())),
        };
        out.extend(problem);
    }
}

fn boxes(q: &Qps, out: &mut Vec<Violation>) {
    let g = &q.graph;
    let mut claimed: Vec<usize> = vec![0; q.forest.len()];
    for (src_flag, dst_flag) in g.edges() {
        let (sv, dv) = (g.flags[src_flag].vertex, g.flags[dst_flag].vertex);
        let (sb, db) = (q.boxes[sv], q.boxes[dv]);
        if !q.forest.is_ancestor_or_self(db, sb) {
            out.push(Violation::EdgeAgainstForest { flag: src_flag });
            continue;
        }
        if sb != db {
            let label = g.vertices[dv].label;
            if !label.is_exponential() {
                out.push(Violation::Border { vertex: dv, flag: dst_flag });
            } else if label == Label::OfCourse {
                if q.forest.parent[sb] != Some(db) {
                    out.push(Violation::OfCourseDeepInput { vertex: dv, flag: dst_flag });
                } else {
                    claimed[sb] += 1;
                }
            }
        }
    }
    for (n, &c) in claimed.iter().enumerate() {
        if c > 1 {
            out.push(Violation::OfCourseShared { node: n });
        }
    }
    let mut last_root: Option<NodeId> = None;
    let mut closed: HashSet<NodeId> = HashSet::new();
    for &t in &g.tails {
        let b = q.boxes[g.flags[t].vertex];
        if !q.forest.is_root(b) {
            out.push(Violation::ConclusionNotAtRoot { flag: t });
            continue;
        }
        if last_root != Some(b) {
            if closed.contains(&b) {
                out.push(Violation::Contiguity { node: b, flag: t });
            }
            if let Some(prev) = last_root {
                closed.insert(prev);
            }
            last_root = Some(b);
        }
    }
    if let Some(prev) = last_root {
        closed.insert(prev);
    }
    for r in q.forest.roots() {
        if !closed.contains(&r) {
            out.push(Violation::RootWithoutConclusion { node: r });
        }
    }
}

fn classify(q: &Qps) -> Classification {
    let g = &q.graph;
    let mut door_of = vec![0usize; q.forest.len()];
    let mut doors_ok = true;
    for vx in &g.vertices {
        if vx.label != Label::OfCourse {
            continue;
        }
        if vx.inputs.len() != 1 {
            doors_ok = false;
            continue;
        }
        match q.source(vx.inputs[0]) {
            Some(s) if q.boxes[s] != q.boxes[g.flags[vx.outputs[0]].vertex] => door_of[q.boxes[s]] += 1,
            _ => doors_ok = false,
        }
    }
    let mell_star = doors_ok && (0..q.forest.len()).all(|n| q.forest.is_root(n) || door_of[n] == 1);
    let daimons_boxed = (0..g.vertices.len()).filter(|&v| g.vertices[v].label == Label::Daimon).all(|v| {
        let b = q.boxes[v];
        !q.forest.is_root(b) && q.boxes.iter().filter(|&&x| x == b).count() == 1
    });
    let dill0_star = q.forest.parent.iter().all(Option::is_none);
    let no_daimon = g.vertices.iter().all(|v| v.label != Label::Daimon);
    Classification {
        mell_star,
        mell: mell_star && daimons_boxed,
        dill0_star,
        dill0: dill0_star && no_daimon,
        proof_structure: q.forest.roots().len() <= 1,
    }
}
