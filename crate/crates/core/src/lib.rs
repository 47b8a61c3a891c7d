//! A workbench for multiplicative-exponential linear-logic proof-structures.
//!
//! - [`formula`]: formulas, negation, sequent contexts and their text codec.
//! - [`graph`]: flags-and-involution graphs, forests, closure, pullback, isomorphism.
//! - [`structure`]: quasi-proof-structures, validation, classification, size.
//! - [`taylor`]: Taylor expansion, membership, emptyings and the S-relative machinery.
//! - [`rewrite`]: deconstruction steps on contexts, MELL structures and sets of resource structures.
//! - [`glue`]: glueability search, certificates and naturality checks.
//! - [`cli`]: JSON documents, DOT export and the `gluon` command line.
//! - [`gen`]: seeded random generators of valid structures.

pub mod cli;
pub mod formula;
pub mod gen;
pub mod glue;
pub mod graph;
pub mod rewrite;
pub mod fixtures;
pub mod structure;
pub mod taylor;

pub use formula::{Context, Formula};
pub use structure::{AxiomMode, Qps};
