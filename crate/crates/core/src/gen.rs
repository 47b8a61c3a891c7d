//! Seeded random generators: MELL structures built by random reverse steps
//! from the empty structure, thick subforests, and (filled) Taylor elements.
//!
//! Building by reverse steps keeps every output valid by construction, and
//! every structure reachable by the rules can be produced.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{Context, Formula};
use crate::graph::{Label, NodeId, RootedForest};
use crate::rewrite::{reverse_mell, Step, StepKind};
use crate::structure::{AxiomMode, Qps};
use crate::taylor::{empty_roots, expand, ThickSubforest, Variant};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenConfig {
    /// Upper bound on the number of cells.
    pub max_cells: usize,
    /// Upper bound on box nesting.
    pub max_depth: usize,
    /// Atomic mode restricts axioms to atoms.
    pub mode: AxiomMode,
    /// Allow daimons (always with at least one output).
    pub daimons: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_cells: 12, max_depth: 3, mode: AxiomMode::Atomic, daimons: true }
    }
}

const ATOMS: [&str; 2] = ["X", "Y"];

pub fn random_atom<R: Rng>(rng: &mut R) -> Formula {
    let name = ATOMS.choose(rng).expect("nonempty");
    if rng.gen_bool(0.5) {
        Formula::var(name)
    } else {
        Formula::dual_var(name)
    }
}

/// A random formula with at most `size` constructors.
pub fn random_formula<R: Rng>(rng: &mut R, size: usize) -> Formula {
    if size <= 1 {
        return match rng.gen_range(0..5) {
            0 => Formula::One,
            1 => Formula::Bot,
            _ => random_atom(rng),
        };
    }
    match rng.gen_range(0..6) {
        0 => Formula::of_course(random_formula(rng, size - 1)),
        1 => Formula::why_not(random_formula(rng, size - 1)),
        2 | 3 => {
            let left = rng.gen_range(1..size);
            let (a, b) = (random_formula(rng, left), random_formula(rng, size - left));
            if rng.gen_bool(0.5) {
                Formula::tensor(a, b)
            } else {
                Formula::par(a, b)
            }
        }
        _ => random_formula(rng, 1),
    }
}

fn insert_block(ctx: &Context, k: usize, block: Vec<Formula>) -> Context {
    let mut blocks = ctx.blocks.clone();
    blocks.insert(k, block);
    Context::new(blocks)
}

fn replace_at(ctx: &Context, i: usize, remove: usize, new: Vec<Formula>) -> Context {
    let (k, j) = ctx.locate(i).expect("position in range");
    let mut blocks = ctx.blocks.clone();
    blocks[k].splice(j..j + remove, new);
    Context::new(blocks)
}

/// Deepest box nesting below the root `root`, counting the root as 0.
fn depth_below(q: &Qps, root: NodeId) -> usize {
    (0..q.forest.len()).filter(|&n| q.forest.root_of(n) == root).map(|n| q.forest.depth(n)).max().unwrap_or(0)
}

fn is_fed_why_not(q: &Qps, i: usize) -> bool {
    let v = q.vertex_of(q.conclusion(i).expect("position in range"));
    q.label(v) == Label::WhyNot && !q.graph.vertices[v].inputs.is_empty()
}

/// Reverse moves available on `q` as a step target: each is a step and the
/// source context it is read back to. Formulas of new blocks are random.
pub fn reverse_moves<R: Rng>(q: &Qps, cfg: &GenConfig, rng: &mut R) -> Vec<(Step, Context)> {
    let ctx = q.type_of();
    let n = ctx.blocks.len();
    let mut out = vec![];
    for k in 0..=n {
        let b = if k == n { ctx.len() + 1 } else { ctx.block_start(k) };
        let a = match cfg.mode {
            AxiomMode::Atomic => random_atom(rng),
            AxiomMode::Eta => random_formula(rng, 3),
        };
        out.push((Step::new(StepKind::Ax, b), insert_block(&ctx, k, vec![a.clone(), a.dual()])));
        out.push((Step::new(StepKind::One, b), insert_block(&ctx, k, vec![Formula::One])));
        out.push((Step::new(StepKind::Bot, b), insert_block(&ctx, k, vec![Formula::Bot])));
        let w = Formula::why_not(random_formula(rng, 2));
        out.push((Step::new(StepKind::Weak, b), insert_block(&ctx, k, vec![w])));
        if cfg.daimons {
            let arity = rng.gen_range(1..=3);
            let outs = (0..arity).map(|_| random_formula(rng, 2)).collect();
            out.push((Step::new(StepKind::Dai, b), insert_block(&ctx, k, outs)));
        }
    }
    for k in 0..n {
        let (s, e) = (ctx.block_start(k), ctx.block_start(k) + ctx.blocks[k].len() - 1);
        let at = |p: usize| ctx.at(p).expect("position in range").clone();
        if k + 1 < n {
            let mut blocks = ctx.blocks.clone();
            let right = blocks.remove(k + 1);
            blocks[k].extend(right);
            out.push((Step::new(StepKind::Mix, e), Context::new(blocks)));
        }
        for p in s..e {
            out.push((Step::new(StepKind::Exc, p), replace_at(&ctx, p, 2, vec![at(p + 1), at(p)])));
            out.push((Step::new(StepKind::Tensor, p), replace_at(&ctx, p, 2, vec![Formula::tensor(at(p), at(p + 1))])));
            out.push((Step::new(StepKind::Par, p), replace_at(&ctx, p, 2, vec![Formula::par(at(p), at(p + 1))])));
            if at(p) == at(p + 1) && at(p).why_not_body().is_some() && is_fed_why_not(q, p) && is_fed_why_not(q, p + 1)
            {
                out.push((Step::new(StepKind::Contr, p), replace_at(&ctx, p, 2, vec![at(p)])));
            }
        }
        if e - s >= 2 && at(e) == at(e - 1).dual() {
            out.push((Step::cut(e - 1, at(e - 1)), replace_at(&ctx, e - 1, 2, vec![])));
        }
        let root = q.root_of_vertex(q.vertex_of(q.conclusion(s).expect("position in range")));
        let deep_ok = depth_below(q, root) < cfg.max_depth;
        for p in s..=e {
            out.push((Step::new(StepKind::Der, p), replace_at(&ctx, p, 1, vec![Formula::why_not(at(p))])));
            let others_why_not = (s..=e)
                .filter(|&o| o != p)
                .all(|o| q.label(q.vertex_of(q.conclusion(o).expect("position in range"))) == Label::WhyNot);
            if deep_ok && others_why_not {
                out.push((Step::new(StepKind::Box, p), replace_at(&ctx, p, 1, vec![Formula::of_course(at(p))])));
            }
        }
    }
    out
}

/// Cells added by reading `kind` backwards (contraction merges two cells).
fn cell_delta(kind: StepKind) -> isize {
    match kind {
        StepKind::Exc | StepKind::Mix => 0,
        StepKind::Contr => -1,
        _ => 1,
    }
}

/// A random valid MELL structure (MELL⁂ when daimons are allowed) with at
/// most `cfg.max_cells` cells and box depth at most `cfg.max_depth`.
pub fn random_mell<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Qps {
    let target = rng.gen_range(1..=cfg.max_cells.max(1));
    let mut q = Qps::empty(cfg.mode);
    for _ in 0..8 * cfg.max_cells.max(1) {
        let cells = q.graph.vertices.len() as isize;
        if cells >= target as isize {
            break;
        }
        let moves: Vec<(Step, Context)> = reverse_moves(&q, cfg, rng)
            .into_iter()
            .filter(|(s, _)| cells + cell_delta(s.kind) <= cfg.max_cells as isize)
            .collect();
        let mut kinds: Vec<StepKind> = moves.iter().map(|(s, _)| s.kind).collect();
        kinds.sort();
        kinds.dedup();
        // New blocks are always possible, so they get a low weight; a
        // contraction needs two equal fed ?-cells side by side, which is rare,
        // so it is preferred whenever it is possible.
        let weight = |k: &StepKind| match k {
            StepKind::Contr => 12,
            k if k.is_hypothesis() => 1,
            _ => 4,
        };
        let Some(&kind) = kinds.choose_weighted(rng, weight).ok() else {
            break;
        };
        if cells < cfg.max_cells as isize && rng.gen_bool(0.15) {
            if let Some(next) = plant_contraction(&q, rng) {
                q = next;
                continue;
            }
        }
        let of_kind: Vec<&(Step, Context)> = moves.iter().filter(|(s, _)| s.kind == kind).collect();
        // A dereliction next to a fed ?-cell of the same type sets up a
        // later contraction.
        let twins: Vec<&(Step, Context)> = of_kind.iter().copied().filter(|(s, _)| twin_der(&q, s)).collect();
        let pool = if !twins.is_empty() && rng.gen_bool(0.7) { twins } else { of_kind };
        let (step, src) = pool.choose(rng).expect("kind is present");
        if let Ok(prev) = reverse_mell(&q, step, src) {
            q = prev;
        }
    }
    q
}

/// Read back, in one go, the steps that end in a contraction: a new
/// hypothesis block for `A` after the block of a fed `?A`, a mix, exchanges
/// that bring `A` beside the `?A`, a dereliction and the contraction itself.
fn plant_contraction<R: Rng>(q: &Qps, rng: &mut R) -> Option<Qps> {
    let ctx = q.type_of();
    let spots: Vec<usize> = (1..=ctx.len())
        .filter(|&p| is_fed_why_not(q, p))
        .filter(|&p| {
            let a = ctx.at(p).and_then(Formula::why_not_body);
            a.is_some_and(|a| a.is_atomic() || matches!(a, Formula::One | Formula::Bot))
        })
        .collect();
    let &p = spots.choose(rng)?;
    let a = ctx.at(p)?.why_not_body()?.clone();
    let (k, _) = ctx.locate(p)?;
    let e = ctx.block_start(k) + ctx.blocks[k].len() - 1;
    let (kind, block) = match a {
        Formula::One => (StepKind::One, vec![Formula::One]),
        Formula::Bot => (StepKind::Bot, vec![Formula::Bot]),
        _ => (StepKind::Ax, vec![a.clone(), a.dual()]),
    };
    // Backwards: each step is read back to its source context.
    let mut moves: Vec<(Step, Context)> = vec![];
    let mut cur = insert_block(&ctx, k + 1, block);
    moves.push((Step::new(kind, e + 1), cur.clone()));
    let mut blocks = cur.blocks.clone();
    let right = blocks.remove(k + 1);
    blocks[k].extend(right);
    cur = Context::new(blocks);
    moves.push((Step::new(StepKind::Mix, e), cur.clone()));
    for j in (p + 1..=e).rev() {
        cur = replace_at(&cur, j, 2, vec![cur.at(j + 1)?.clone(), cur.at(j)?.clone()]);
        moves.push((Step::new(StepKind::Exc, j), cur.clone()));
    }
    cur = replace_at(&cur, p + 1, 1, vec![Formula::why_not(a.clone())]);
    moves.push((Step::new(StepKind::Der, p + 1), cur.clone()));
    cur = replace_at(&cur, p, 2, vec![Formula::why_not(a)]);
    moves.push((Step::new(StepKind::Contr, p), cur));
    let mut r = q.clone();
    for (step, src) in &moves {
        r = reverse_mell(&r, step, src).ok()?;
    }
    Some(r)
}

fn twin_der(q: &Qps, s: &Step) -> bool {
    if s.kind != StepKind::Der {
        return false;
    }
    let ty = Formula::why_not(q.ty(q.conclusion(s.i).expect("position in range")).clone());
    let same_root = |p: usize| {
        let root = |i: usize| q.root_of_vertex(q.vertex_of(q.conclusion(i).expect("position in range")));
        q.conclusion(p).is_some() && root(p) == root(s.i)
    };
    [s.i.wrapping_sub(1), s.i + 1]
        .into_iter()
        .any(|p| p >= 1 && same_root(p) && *q.ty(q.conclusion(p).expect("checked")) == ty && is_fed_why_not(q, p))
}

/// A random thick subforest with at most `max_copies` copies of each box
/// per copy of its parent.
pub fn random_thick_subforest<R: Rng>(rng: &mut R, f: &RootedForest, max_copies: usize) -> ThickSubforest {
    let kids = f.children_table();
    let mut sigma = RootedForest::new();
    let mut h = vec![];
    fn grow<R: Rng>(
        rng: &mut R,
        kids: &[Vec<NodeId>],
        n: NodeId,
        parent: Option<NodeId>,
        max: usize,
        sigma: &mut RootedForest,
        h: &mut Vec<NodeId>,
    ) {
        let x = sigma.add(parent);
        h.push(n);
        for &c in &kids[n] {
            for _ in 0..rng.gen_range(0..=max) {
                grow(rng, kids, c, Some(x), max, sigma, h);
            }
        }
    }
    for r in f.roots() {
        grow(rng, &kids, r, None, max_copies, &mut sigma, &mut h);
    }
    ThickSubforest { sigma, h }
}

pub fn random_taylor_element<R: Rng>(rng: &mut R, r: &Qps, max_copies: usize) -> Qps {
    let t = random_thick_subforest(rng, &r.forest, max_copies);
    expand(r, &t).structure
}

/// A random element of the filled (or η-filled) Taylor expansion: a Taylor
/// element with some roots emptied, and in the η variant some `?`-cell
/// conclusions of emptied roots kept behind fresh `?`-cells.
pub fn random_filled_element<R: Rng>(rng: &mut R, r: &Qps, max_copies: usize, variant: Variant) -> Qps {
    let rho = random_taylor_element(rng, r, max_copies);
    let roots: Vec<NodeId> = rho.blocks().into_iter().map(|(n, _)| n).filter(|_| rng.gen_bool(0.3)).collect();
    let routed: Vec<usize> = match variant {
        Variant::Filled => vec![],
        Variant::Eta => (1..=rho.conclusions().len())
            .filter(|&i| {
                let v = rho.vertex_of(rho.conclusion(i).expect("position in range"));
                rho.label(v) == Label::WhyNot && roots.contains(&rho.root_of_vertex(v))
            })
            .filter(|_| rng.gen_bool(0.5))
            .collect(),
    };
    empty_roots(&rho, &roots, &routed)
}
