//! The termination measure: per component, the multiset of `?`-cell arities
//! and the number of non-daimon cells, ordered lexicographically; components
//! are compared in the multiset order.
//!
//! For a total order the multiset order coincides with the lexicographic
//! order on descending-sorted sequences, which is how both levels are stored.

use crate::graph::Label;

use super::Qps;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentSize {
    /// `?`-cell arities, sorted descending.
    pub arities: Vec<usize>,
    pub cells: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SizeMeasure(pub Vec<ComponentSize>);

pub fn component_size(q: &Qps, root: usize) -> ComponentSize {
    let vs = q.vertices_under(root);
    let mut arities: Vec<usize> =
        vs.iter().filter(|&&v| q.label(v) == Label::WhyNot).map(|&v| q.graph.vertices[v].inputs.len()).collect();
    arities.sort_unstable_by(|a, b| b.cmp(a));
    let cells = vs.iter().filter(|&&v| q.label(v) != Label::Daimon).count();
    ComponentSize { arities, cells }
}

pub fn size_measure(q: &Qps) -> SizeMeasure {
    let mut cs: Vec<ComponentSize> = q.forest.roots().into_iter().map(|r| component_size(q, r)).collect();
    cs.sort_unstable_by(|a, b| b.cmp(a));
    SizeMeasure(cs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{AxiomMode, Builder};
    use std::cmp::Ordering;

    /// Multiset order by definition: M > N iff M != N and every element of
    /// N \ M is dominated by some element of M \ N.
    fn dm_greater<T: Ord + Clone>(m: &[T], n: &[T]) -> bool {
        let mut m_minus = m.to_vec();
        let mut n_minus = vec![];
        for x in n {
            if let Some(p) = m_minus.iter().position(|y| y == x) {
                m_minus.remove(p);
            } else {
                n_minus.push(x.clone());
            }
        }
        !(m_minus.is_empty() && n_minus.is_empty()) && n_minus.iter().all(|x| m_minus.iter().any(|y| y > x))
    }

    #[test]
    fn examples() {
        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let o = b.cell(Label::One, r, &[], &["1"]);
        b.conclude(&[b.out(o, 0)]);
        assert_eq!(size_measure(&b.finish()), SizeMeasure(vec![ComponentSize { arities: vec![], cells: 1 }]));

        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let w = b.cell(Label::WhyNot, r, &[], &["?bot"]);
        for _ in 0..3 {
            let x = b.cell(Label::Bot, r, &[], &["bot"]);
            b.feed(x, 0, w);
        }
        b.conclude(&[b.out(w, 0)]);
        let before = size_measure(&b.finish());
        assert_eq!(before, SizeMeasure(vec![ComponentSize { arities: vec![3], cells: 4 }]));
        let after = SizeMeasure(vec![ComponentSize { arities: vec![2, 1], cells: 5 }]);
        assert!(dm_greater(&[3usize], &[2, 1]));
        assert_eq!(before.cmp(&after), Ordering::Greater);
    }

    #[test]
    fn sorted_lex_matches_multiset_order() {
        let pool: Vec<Vec<usize>> = vec![vec![], vec![0], vec![1], vec![2], vec![1, 0], vec![2, 1], vec![2, 2], vec![3], vec![1, 1, 1]];
        for a in &pool {
            for b in &pool {
                let lex = a.cmp(b) == Ordering::Greater;
                assert_eq!(lex, dm_greater(a, b), "{a:?} vs {b:?}");
            }
        }
    }
}
