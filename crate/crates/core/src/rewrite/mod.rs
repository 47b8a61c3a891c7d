//! Deconstruction paths: elementary steps typed on contexts, their action on
//! MELL structures (forwards and backwards) and on sets of resource
//! structures, and the termination strategy.

mod dill;
mod local;
mod mell;
mod step;
mod terminate;

pub use dill::{apply_dill, apply_dill_set, DillConfig};
pub use mell::{apply_mell, replay_mell, reverse_mell, reverse_replay, ReplayError, RewriteError};
pub use step::{
    format_path, parse_path, path_contexts, typecheck_path, PathTypeError, Step, StepKind, StepParseError, TypeError,
};
pub use terminate::{applicable_steps, exchanges_to_end, find_termination_path, TerminationError};

pub(crate) use local::{dedupe, lone_vertex, pieces, same_classes, HashedSet};
