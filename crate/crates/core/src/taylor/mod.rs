//! Taylor expansion and its filled, η-filled and fattened variants.

mod emptying;
mod expand;
mod fat;
mod lemmas;
mod member;
mod thick;

pub use emptying::{daimon_component, empty_roots, emptyings, is_filled_member, FilledWitness, Variant};
pub use expand::{expand, TaylorElement};
pub use fat::{
    assemble, emptying_wrt, fattened_component_members, fattened_members, is_s_fat, strip_component,
    strip_to_taylor, Emptied, FatElement, FatError, FatPart, UpwardClosedSet,
};
pub use lemmas::{check_cell_types, check_conclusions, check_connectivity, conclusion_classes};
pub use member::is_taylor_member;
pub use thick::{enumerate_thick_subforests, multisets, shapes, subforest_of, Shape, ThickSubforest};
