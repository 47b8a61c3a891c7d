//! Executable checks of the properties every (fattened) element shares with
//! the structure it comes from.

use crate::graph::{connectivity, Label};
use crate::structure::Qps;

/// Same conclusions, types and root blocking.
pub fn check_conclusions(r: &Qps, element: &Qps) -> bool {
    element.type_of() == r.type_of()
}

fn conclusion_labels(q: &Qps) -> Vec<Label> {
    q.conclusions().iter().map(|&t| q.label(q.vertex_of(t))).collect()
}

/// At every conclusion the element has the structure's cell type or a daimon.
pub fn check_cell_types(r: &Qps, element: &Qps) -> bool {
    let (a, b) = (conclusion_labels(r), conclusion_labels(element));
    a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| y == x || *y == Label::Daimon)
}

/// Connected-component id of each conclusion.
pub fn conclusion_classes(q: &Qps) -> Vec<usize> {
    let c = connectivity(&q.graph.to_graph());
    q.conclusions().iter().map(|&t| c.component[q.vertex_of(t)]).collect()
}

/// Conclusions connected in `r` stay connected in the element.
pub fn check_connectivity(r: &Qps, element: &Qps) -> bool {
    let (a, b) = (conclusion_classes(r), conclusion_classes(element));
    a.len() == b.len() && (0..a.len()).all(|i| (i + 1..a.len()).all(|j| a[i] != a[j] || b[i] == b[j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::taylor::{enumerate_thick_subforests, expand, fattened_members};

    #[test]
    fn lemmas_on_two_root_boxes() {
        let r = fixtures::two_root_boxes();
        for t in enumerate_thick_subforests(&r.forest, 2).step_by(5) {
            let e = expand(&r, &t).structure;
            assert!(check_conclusions(&r, &e));
            assert!(check_cell_types(&r, &e));
        }
        for fat in fattened_members(&r, 1) {
            assert!(check_conclusions(&r, &fat.structure));
            assert!(check_cell_types(&r, &fat.structure));
            assert!(check_connectivity(&r, &fat.structure), "{:?}", fat.parts.iter().map(|p| &p.s).collect::<Vec<_>>());
        }
    }

    /// Zero copies of a box can disconnect conclusions, which is why the
    /// connectivity property is stated for fattened elements.
    #[test]
    fn plain_elements_may_disconnect() {
        let r = fixtures::two_root_boxes();
        let bare = expand(&r, &crate::taylor::ThickSubforest::roots_of(&r.forest)).structure;
        assert!(!check_connectivity(&r, &bare));
    }
}
