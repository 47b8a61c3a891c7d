//! One sample of each property suite, driven by a seed. The acceptance
//! harness runs them on fixed seeds, the property tests on arbitrary ones.

use rand::seq::SliceRandom;
use rand::Rng;

use gluon::cli::{export_dot, Document};
use gluon::glue::check_naturality_square;
use gluon::graph::Label;
use gluon::rewrite::{
    apply_mell, find_termination_path, replay_mell, reverse_mell, DillConfig, Step, StepKind,
};
use gluon::structure::{is_iso, size_measure, validate_classify, AxiomMode, Qps};
use gluon::taylor::{
    assemble, check_cell_types, check_conclusions, check_connectivity, fattened_component_members,
    is_taylor_member, strip_to_taylor, FatElement, Variant,
};
use gluon::gen::{self, GenConfig};

use super::dot_grammar;

/// A random MELL⁂ structure: at most 12 cells, box depth at most 3.
pub fn random_structure(seed: u64) -> Qps {
    gen::random_mell(&mut gen::rng(seed), &GenConfig::default())
}

/// The termination strategy reaches ε and every rule other than exc and
/// mix strictly lowers the size measure.
pub fn termination(seed: u64) -> Result<(), String> {
    let r = random_structure(seed);
    let path = find_termination_path(&r).map_err(|e| e.to_string())?;
    let frames = replay_mell(&r, &path).map_err(|e| e.to_string())?;
    if !frames.last().is_some_and(Qps::is_empty) {
        return Err("the path does not end on ε".into());
    }
    for (k, s) in path.iter().enumerate() {
        let (a, b) = (size_measure(&frames[k]), size_measure(&frames[k + 1]));
        if !matches!(s.kind, StepKind::Exc | StepKind::Mix) && b >= a {
            return Err(format!("step {k} ({s}) does not lower the measure"));
        }
    }
    Ok(())
}

/// Every step that applies to `r`: each kind at each position, and each
/// cut formula found in a block.
pub fn applicable_steps(r: &Qps) -> Vec<Step> {
    let n = r.conclusions().len();
    let mut cands = vec![];
    for i in 1..=n {
        for kind in StepKind::ALL {
            if kind != StepKind::Cut {
                cands.push(Step::new(kind, i));
            }
        }
    }
    let mut end = 0;
    for (root, tails) in r.blocks() {
        end += tails.len();
        for v in r.vertices_in(root) {
            if r.label(v) == Label::Cut {
                let s = Step::cut(end + 1, r.ty(r.graph.vertices[v].inputs[0]).clone());
                if !cands.contains(&s) {
                    cands.push(s);
                }
            }
        }
    }
    cands.retain(|s| apply_mell(r, s).is_ok_and(|v| !v.is_empty()));
    cands
}

/// A random structure with a set of up to three random filled elements,
/// checked against every step that applies; returns the kinds checked.
pub fn naturality(seed: u64) -> Result<Vec<StepKind>, String> {
    let mut rng = gen::rng(seed ^ 0x6e61_7475);
    let r = random_structure(seed);
    let size = rng.gen_range(1..=3);
    let pi: Vec<Qps> =
        (0..size).map(|_| gen::random_filled_element(&mut rng, &r, 2, Variant::Filled)).collect();
    let cfg = DillConfig::new(AxiomMode::Atomic);
    let mut kinds = vec![];
    for step in applicable_steps(&r) {
        let rep = check_naturality_square(&r, &step, &pi, &cfg);
        if !rep.holds() {
            return Err(format!("{step}: {}", rep.failures.join("; ")));
        }
        kinds.push(step.kind);
    }
    Ok(kinds)
}

/// A random target structure and a reverse move of `kind` on it: reading
/// the step backwards then forwards gets the target back, and every
/// forward result reads back to the same source. `None` when no move of
/// that kind is available on the sampled target.
pub fn cofunctionality(seed: u64, kind: StepKind) -> Option<Result<(), String>> {
    let mut rng = gen::rng(seed ^ 0x636f_6675);
    let cfg = GenConfig::default();
    let target = gen::random_mell(&mut rng, &cfg);
    let moves: Vec<_> = gen::reverse_moves(&target, &cfg, &mut rng).into_iter().filter(|(s, _)| s.kind == kind).collect();
    let (step, src) = moves.choose(&mut rng)?.clone();
    if matches!(kind, StepKind::Contr | StepKind::Box) && daimon_output_at(&target, step.i, kind) {
        return None;
    }
    let source = match reverse_mell(&target, &step, &src) {
        Ok(s) => s,
        Err(e) => return Some(Err(format!("{step} backwards: {e}"))),
    };
    Some((|| {
        validate_classify(&source).map_err(|v| format!("{step} backwards gives an invalid structure: {v:?}"))?;
        let forward = apply_mell(&source, &step).map_err(|e| format!("{step} forwards: {e}"))?;
        if !forward.iter().any(|q| is_iso(q, &target)) {
            return Err(format!("{step}: the target is not among the forward results"));
        }
        for q in &forward {
            let back = reverse_mell(q, &step, &src).map_err(|e| format!("{step} backwards again: {e}"))?;
            if !is_iso(&back, &source) {
                return Err(format!("{step}: a forward result reads back to another source"));
            }
        }
        Ok(())
    })())
}

/// Contraction and box read backwards have no preimage on a daimon output.
fn daimon_output_at(q: &Qps, i: usize, kind: StepKind) -> bool {
    let positions = if kind == StepKind::Contr { vec![i, i + 1] } else { vec![i] };
    positions
        .into_iter()
        .filter_map(|p| q.conclusion(p))
        .any(|t| q.label(q.vertex_of(t)) == Label::Daimon)
}

/// A random fattened element of `r` at bound 1, one random part per root.
pub fn random_fattened<R: Rng>(rng: &mut R, r: &Qps) -> FatElement {
    let parts = r
        .forest
        .roots()
        .into_iter()
        .map(|n| fattened_component_members(&r.component(n), 1).choose(rng).expect("at least one part").clone())
        .collect();
    assemble(r, parts)
}

/// Conclusions and conclusion cell types are preserved by a random plain
/// element and a random fattened element; the fattened element keeps
/// connected conclusions connected.
pub fn lemmas(seed: u64) -> Result<(), String> {
    let mut rng = gen::rng(seed ^ 0x6c65_6d6d);
    let r = random_structure(seed);
    let plain = gen::random_taylor_element(&mut rng, &r, 2);
    let fat = random_fattened(&mut rng, &r).structure;
    for (what, e) in [("plain", &plain), ("fattened", &fat)] {
        if !check_conclusions(&r, e) {
            return Err(format!("{what} element changes the conclusions"));
        }
        if !check_cell_types(&r, e) {
            return Err(format!("{what} element changes a conclusion cell type"));
        }
    }
    if !check_connectivity(&r, &fat) {
        return Err("fattened element disconnects conclusions".into());
    }
    Ok(())
}

/// Stripping a random fattened element gives a Taylor element.
pub fn stripping(seed: u64) -> Result<(), String> {
    let mut rng = gen::rng(seed ^ 0x7374_7270);
    let r = random_structure(seed);
    let fat = random_fattened(&mut rng, &r);
    let t = strip_to_taylor(&r, &fat);
    is_taylor_member(&t.structure, &r).map(|_| ()).ok_or_else(|| "stripped element is not a member".into())
}

/// JSON round trip up to iso and a well-formed DOT rendering.
pub fn roundtrip(q: &Qps) -> Result<(), String> {
    let text = serde_json::to_string(&Document::from_qps(q)).map_err(|e| e.to_string())?;
    let d: Document = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let back = d.to_qps().map_err(|e| e.to_string())?;
    if !is_iso(&back, q) {
        return Err("round trip changes the structure".into());
    }
    if Document::from_qps(&back) != d {
        return Err("serialization is not canonical".into());
    }
    dot_grammar::check(&export_dot(q)).map_err(|e| format!("DOT: {e}"))
}

/// A random structure for the format suite, in either axiom mode.
pub fn random_for_format(seed: u64) -> Qps {
    let mode = if seed.is_multiple_of(2) { AxiomMode::Atomic } else { AxiomMode::Eta };
    gen::random_mell(&mut gen::rng(seed), &GenConfig { mode, ..GenConfig::default() })
}
