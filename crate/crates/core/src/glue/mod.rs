//! Glueability: searching a path from a set of resource structures to
//! `{ε}`, rebuilding the MELL structure it witnesses and certifying every
//! membership, plus instance checks of the naturality square.

mod naturality;
mod search;

use std::collections::HashSet;

use thiserror::Error;

use crate::formula::{subformula_closure, Context, Formula};
use crate::graph::NodeId;
use crate::rewrite::{
    apply_dill_set, reverse_replay, same_classes, typecheck_path, DillConfig, PathTypeError, ReplayError, Step,
};
use crate::structure::{validate_classify, AxiomMode, Classification, Qps};
use crate::taylor::{is_filled_member, is_taylor_member, ThickSubforest, Variant};

pub use naturality::{check_naturality_lift, check_naturality_square, NaturalityReport};
pub use search::cost;

#[derive(Clone, Debug)]
pub struct GlueConfig {
    /// Most rule steps a path may have; exchanges are free.
    pub max_depth: usize,
    /// Formulas tried for cuts on daimons; `None` means the subformula
    /// closure of the conclusions.
    pub cut_candidates: Option<Vec<Formula>>,
    pub mode: AxiomMode,
    /// Also try cuts on formulas not taken from a cut cell of the input.
    pub enumerate_daimon_cut: bool,
}

impl GlueConfig {
    pub fn new(mode: AxiomMode, max_depth: usize) -> GlueConfig {
        GlueConfig { max_depth, cut_candidates: None, mode, enumerate_daimon_cut: false }
    }
}

/// How one element of the set sits in the expansion of the witness.
#[derive(Clone, Debug)]
pub struct Membership {
    pub subforest: ThickSubforest,
    /// Roots of the witness emptied to produce the element.
    pub emptied: Vec<NodeId>,
    /// Conclusions routed through a `?`-cell behind the daimon (η mode).
    pub routed: Vec<usize>,
    /// The element is a plain Taylor element, without emptying.
    pub plain: bool,
}

#[derive(Clone, Debug)]
pub struct GlueCertificate {
    pub path: Vec<Step>,
    /// The MELL⁂ structure whose filled expansion contains every element.
    pub witness: Qps,
    pub memberships: Vec<Membership>,
    pub classification: Classification,
    /// The sets along the path, the input first and `{ε}` last.
    pub frames: Vec<Vec<Qps>>,
}

#[derive(Clone, Debug)]
pub enum GlueOutcome {
    Glueable(Box<GlueCertificate>),
    /// No path with at most `depth` rule steps; says nothing beyond the bound.
    NotWithinBound { depth: usize },
}

#[derive(Debug, Clone, Error)]
pub enum GlueError {
    #[error("the set is empty")]
    Empty,
    #[error("element {index} has type {found}, expected {expected}")]
    Heterogeneous { index: usize, expected: Context, found: Context },
    #[error("element {index} is not a valid resource structure")]
    Invalid { index: usize },
    #[error(transparent)]
    PathType(#[from] PathTypeError),
    #[error("the path ends on {0}, not on the empty context")]
    NotEmptyTarget(Context),
    #[error("no choice of branches replays the path to the empty structure")]
    ReplayDiverges,
    #[error("reverse replay failed: {0}")]
    Reverse(#[from] ReplayError),
    #[error("element {index} is not in the filled expansion of the rebuilt structure")]
    Membership { index: usize },
    #[error("certificate check failed: {0}")]
    Strengthening(String),
}

/// The filled variant matching the daimon rules of a mode.
pub fn variant_of(mode: AxiomMode) -> Variant {
    match mode {
        AxiomMode::Atomic => Variant::Filled,
        AxiomMode::Eta => Variant::Eta,
    }
}

/// Check that `pi` is a nonempty set of valid resource structures of one type.
pub fn check_set(pi: &[Qps]) -> Result<Context, GlueError> {
    let first = pi.first().ok_or(GlueError::Empty)?;
    let expected = first.type_of();
    for (index, rho) in pi.iter().enumerate() {
        if !validate_classify(rho).is_ok_and(|c| c.dill0_star) {
            return Err(GlueError::Invalid { index });
        }
        let found = rho.type_of();
        if found != expected {
            return Err(GlueError::Heterogeneous { index, expected, found });
        }
    }
    Ok(expected)
}

/// Look for a path from `pi` to `{ε}` within the bound and certify it.
pub fn glueability_search(pi: &[Qps], cfg: &GlueConfig) -> Result<GlueOutcome, GlueError> {
    let ctx = check_set(pi)?;
    let cuts = match (cfg.enumerate_daimon_cut, &cfg.cut_candidates) {
        (false, _) => vec![],
        (true, Some(c)) => c.clone(),
        (true, None) => subformula_closure(ctx.blocks.iter().flatten()).into_iter().collect(),
    };
    let mut s = search::Search::new(DillConfig::new(cfg.mode), cuts);
    match s.solve(pi, cfg.max_depth).found() {
        Some(path) => Ok(GlueOutcome::Glueable(Box::new(reconstruct_and_certify(pi, &path, cfg.mode)?))),
        None => Ok(GlueOutcome::NotWithinBound { depth: cfg.max_depth }),
    }
}

/// Replay `path` on `pi` down to `{ε}`, rebuild the witness by reverse replay
/// from ε and verify every membership.
pub fn reconstruct_and_certify(pi: &[Qps], path: &[Step], mode: AxiomMode) -> Result<GlueCertificate, GlueError> {
    let ctx = check_set(pi)?;
    let end = typecheck_path(path, &ctx)?;
    if !end.is_empty() {
        return Err(GlueError::NotEmptyTarget(end));
    }
    let frames = replay_sets(pi, path, &DillConfig::new(mode)).ok_or(GlueError::ReplayDiverges)?;
    let witness = reverse_replay(&Qps::empty(mode), path, &ctx)?.swap_remove(0);
    let mut memberships = vec![];
    for (index, rho) in pi.iter().enumerate() {
        let w = is_filled_member(rho, &witness, variant_of(mode)).ok_or(GlueError::Membership { index })?;
        let plain = w.emptied.is_empty();
        memberships.push(Membership { subforest: w.subforest, emptied: w.emptied, routed: w.routed, plain });
    }
    let classification = validate_classify(&witness)
        .map_err(|v| GlueError::Strengthening(format!("rebuilt structure is invalid: {v:?}")))?;
    if !classification.mell_star {
        return Err(GlueError::Strengthening("rebuilt structure is not MELL⁂".into()));
    }
    if pi.iter().all(is_daimon_free) {
        if !classification.mell {
            return Err(GlueError::Strengthening("daimon-free set but the rebuilt structure has a daimon".into()));
        }
        if let Some(index) = pi.iter().position(|rho| is_taylor_member(rho, &witness).is_none()) {
            return Err(GlueError::Membership { index });
        }
    }
    Ok(GlueCertificate { path: path.to_vec(), witness, memberships, classification, frames })
}

pub fn is_daimon_free(q: &Qps) -> bool {
    (0..q.graph.vertices.len()).all(|v| q.label(v) != crate::graph::Label::Daimon)
}

/// Sets along `path` from `pi` to `{ε}`, choosing branches by depth-first
/// search; `None` if no choice reaches `{ε}`.
pub fn replay_sets(pi: &[Qps], path: &[Step], cfg: &DillConfig) -> Option<Vec<Vec<Qps>>> {
    struct Dfs<'a> {
        path: &'a [Step],
        cfg: &'a DillConfig,
        dead: Vec<Vec<Vec<Qps>>>,
        seen: Vec<HashSet<Vec<u64>>>,
    }
    impl Dfs<'_> {
        fn go(&mut self, k: usize, set: Vec<Qps>) -> Option<Vec<Vec<Qps>>> {
            if k == self.path.len() {
                return set.iter().all(Qps::is_empty).then(|| vec![set]);
            }
            let key: Vec<u64> = set.iter().map(Qps::invariant_hash).collect();
            if self.seen[k].contains(&key) && self.dead[k].iter().any(|d| same_classes(d, &set)) {
                return None;
            }
            for alt in apply_dill_set(&set, &self.path[k], self.cfg).unwrap_or_default() {
                if let Some(mut rest) = self.go(k + 1, alt) {
                    rest.insert(0, set);
                    return Some(rest);
                }
            }
            self.seen[k].insert(key);
            self.dead[k].push(set);
            None
        }
    }
    let mut start = crate::rewrite::dedupe(pi.to_vec());
    start.sort_by_key(Qps::invariant_hash);
    let n = path.len();
    Dfs { path, cfg, dead: vec![vec![]; n], seen: vec![HashSet::new(); n] }.go(0, start)
}
