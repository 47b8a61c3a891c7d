//! Thick subforests: how many copies of each box to take, recursively.

use std::rc::Rc;

use crate::graph::{NodeId, RootedForest};

/// A forest `sigma` with a parent-preserving map `h` into a box-forest that is
/// bijective on roots.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ThickSubforest {
    pub sigma: RootedForest,
    pub h: Vec<NodeId>,
}

impl ThickSubforest {
    /// The subforest made of the roots of `f` only.
    pub fn roots_of(f: &RootedForest) -> ThickSubforest {
        let roots = f.roots();
        ThickSubforest { sigma: RootedForest::roots_only(roots.len()), h: roots }
    }

    /// One copy of every node.
    pub fn identity(f: &RootedForest) -> ThickSubforest {
        ThickSubforest { sigma: f.clone(), h: (0..f.len()).collect() }
    }

    pub fn is_valid_for(&self, f: &RootedForest) -> bool {
        let roots_ok = {
            let mut imgs: Vec<NodeId> = self.sigma.roots().iter().map(|&r| self.h[r]).collect();
            imgs.sort_unstable();
            imgs == f.roots()
        };
        roots_ok
            && self.h.len() == self.sigma.len()
            && (0..self.sigma.len()).all(|x| match self.sigma.parent[x] {
                None => f.is_root(self.h[x]),
                Some(p) => f.parent[self.h[x]] == Some(self.h[p]),
            })
    }

    /// Number of copies of each node of the target forest.
    pub fn counts(&self, target_len: usize) -> Vec<usize> {
        let mut c = vec![0; target_len];
        for &n in &self.h {
            c[n] += 1;
        }
        c
    }

    /// Copies of each target node under each copy of its parent, in preorder.
    pub fn describe(&self) -> String {
        let kids = self.sigma.children_table();
        fn go(t: &ThickSubforest, kids: &[Vec<NodeId>], x: NodeId, out: &mut String) {
            out.push_str(&t.h[x].to_string());
            if !kids[x].is_empty() {
                out.push('[');
                for (i, &c) in kids[x].iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    go(t, kids, c, out);
                }
                out.push(']');
            }
        }
        let mut out = String::new();
        for (i, r) in self.sigma.roots().into_iter().enumerate() {
            if i > 0 {
                out.push_str("; ");
            }
            go(self, &kids, r, &mut out);
        }
        out
    }
}

/// A thick subtree up to isomorphism: the node it copies and the copies of
/// its children, grouped per child node and sorted canonically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Shape {
    pub node: NodeId,
    pub kids: Vec<Rc<Shape>>,
}

impl Shape {
    pub fn leaf(node: NodeId) -> Shape {
        Shape { node, kids: vec![] }
    }

    fn emit(&self, sigma: &mut RootedForest, h: &mut Vec<NodeId>, parent: Option<NodeId>) {
        let x = sigma.add(parent);
        h.push(self.node);
        for k in &self.kids {
            k.emit(sigma, h, Some(x));
        }
    }
}

/// Assemble one shape per root (in the forest's root order) into a subforest.
pub fn subforest_of(shapes: &[Rc<Shape>]) -> ThickSubforest {
    let mut sigma = RootedForest::new();
    let mut h = vec![];
    for s in shapes {
        s.emit(&mut sigma, &mut h, None);
    }
    ThickSubforest { sigma, h }
}

/// All multisets of size `0..=bound` over `items`, as non-decreasing index lists.
pub fn multisets(n_items: usize, bound: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..bound {
        let mut next = vec![];
        for m in &frontier {
            let start = m.last().copied().unwrap_or(0);
            for i in start..n_items {
                let mut m2: Vec<usize> = m.clone();
                m2.push(i);
                next.push(m2);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Every thick subtree of the subtree at `n`, up to isomorphism, with at most
/// `bound` copies of each child per copy of its parent.
pub fn shapes(f: &RootedForest, n: NodeId, bound: usize) -> Vec<Rc<Shape>> {
    let kids = f.children_table();
    shapes_rec(&kids, n, bound)
}

fn shapes_rec(kids: &[Vec<NodeId>], n: NodeId, bound: usize) -> Vec<Rc<Shape>> {
    let mut partial: Vec<Vec<Rc<Shape>>> = vec![vec![]];
    for &c in &kids[n] {
        let sub = shapes_rec(kids, c, bound);
        let choices = multisets(sub.len(), bound);
        let mut next = vec![];
        for p in &partial {
            for m in &choices {
                let mut q = p.clone();
                q.extend(m.iter().map(|&i| sub[i].clone()));
                next.push(q);
            }
        }
        partial = next;
    }
    partial.into_iter().map(|ks| Rc::new(Shape { node: n, kids: ks })).collect()
}

/// Lazily enumerate every thick subforest of `f` with at most `bound` copies
/// of each node per copy of its parent, each once up to isomorphism.
pub fn enumerate_thick_subforests(f: &RootedForest, bound: usize) -> impl Iterator<Item = ThickSubforest> {
    let per_root: Vec<Vec<Rc<Shape>>> = f.roots().into_iter().map(|r| shapes(f, r, bound)).collect();
    let total: usize = per_root.iter().map(Vec::len).product();
    (0..total).map(move |mut idx| {
        let mut pick = vec![];
        for list in &per_root {
            pick.push(list[idx % list.len()].clone());
            idx /= list.len();
        }
        subforest_of(&pick)
    })
}
