//! Instance checks of the naturality square between the action of a step
//! on MELL⁂ structures and its action on sets of resource structures.

use serde::Serialize;

use crate::formula::Context;
use crate::rewrite::{apply_dill_set, apply_mell, reverse_mell, DillConfig, Step};
use crate::structure::{validate_classify, Qps};
use crate::taylor::{is_filled_member, is_taylor_member};

use super::{is_daimon_free, variant_of};

#[derive(Clone, Debug, Default, Serialize)]
pub struct NaturalityReport {
    /// Number of structures the step maps the source to.
    pub targets: usize,
    /// For each target, the index of a set the step maps `Π` to that lies in
    /// its filled expansion.
    pub forward_witnesses: Vec<Option<usize>>,
    /// Pairs (set, target) with the set inside the target's expansion, each
    /// lifted back along the reverse step.
    pub lifts_checked: usize,
    pub failures: Vec<String>,
}

impl NaturalityReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

fn inside(pi: &[Qps], r: &Qps, cfg: &DillConfig) -> bool {
    pi.iter().all(|rho| is_filled_member(rho, r, variant_of(cfg.mode)).is_some())
}

/// Both legs of the square for `r`, `step` and `pi` inside the filled
/// expansion of `r`: every target of `r` has a set reached from `pi` inside
/// its expansion, and every such set lifts back along the reverse step.
pub fn check_naturality_square(r: &Qps, step: &Step, pi: &[Qps], cfg: &DillConfig) -> NaturalityReport {
    let mut rep = NaturalityReport::default();
    if !inside(pi, r, cfg) {
        rep.failures.push("the set is not inside the expansion of the source".into());
        return rep;
    }
    let targets = match apply_mell(r, step) {
        Ok(t) => t,
        Err(e) => {
            rep.failures.push(format!("{step} on the source: {e}"));
            return rep;
        }
    };
    let sets = match apply_dill_set(pi, step, cfg) {
        Ok(s) => s,
        Err(e) => {
            rep.failures.push(format!("{step} on the set: {e}"));
            return rep;
        }
    };
    rep.targets = targets.len();
    for (k, rp) in targets.iter().enumerate() {
        let w = sets.iter().position(|s| inside(s, rp, cfg));
        if w.is_none() {
            rep.failures.push(format!("target {k}: no set reached by {step} lies in its expansion"));
        }
        rep.forward_witnesses.push(w);
    }
    for rp in &targets {
        lift(rp, step, &r.type_of(), pi, &sets, cfg, &mut rep);
    }
    rep
}

/// The lifting leg alone, for an arbitrary `r_prime` of the step's target
/// type: every set reached from `pi` that lies in the expansion of
/// `r_prime` must come from the expansion of the reverse step's result.
pub fn check_naturality_lift(r_prime: &Qps, step: &Step, src: &Context, pi: &[Qps], cfg: &DillConfig) -> NaturalityReport {
    let mut rep = NaturalityReport::default();
    match apply_dill_set(pi, step, cfg) {
        Ok(sets) => lift(r_prime, step, src, pi, &sets, cfg, &mut rep),
        Err(e) => rep.failures.push(format!("{step} on the set: {e}")),
    }
    rep
}

fn lift(rp: &Qps, step: &Step, src: &Context, pi: &[Qps], sets: &[Vec<Qps>], cfg: &DillConfig, rep: &mut NaturalityReport) {
    let plain_source = pi.iter().all(is_daimon_free);
    let rp_mell = validate_classify(rp).is_ok_and(|c| c.mell);
    for s in sets.iter().filter(|s| inside(s, rp, cfg)) {
        rep.lifts_checked += 1;
        let back = match reverse_mell(rp, step, src) {
            Ok(b) => b,
            Err(e) => {
                rep.failures.push(format!("reverse {step}: {e}"));
                continue;
            }
        };
        if !inside(pi, &back, cfg) {
            rep.failures.push(format!("the set is not inside the expansion of the structure rebuilt by {step}"));
            continue;
        }
        let plain_target = rp_mell && s.iter().all(|rho| is_taylor_member(rho, rp).is_some());
        if plain_source && plain_target {
            if !validate_classify(&back).is_ok_and(|c| c.mell) {
                rep.failures.push(format!("the structure rebuilt by {step} is not MELL"));
            }
            if !pi.iter().all(|rho| is_taylor_member(rho, &back).is_some()) {
                rep.failures.push(format!("the set is not in the plain expansion of the structure rebuilt by {step}"));
            }
        }
    }
}
