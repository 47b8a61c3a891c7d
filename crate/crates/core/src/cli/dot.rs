//! Graphviz export: roots as dashed clusters, boxes as solid clusters nested
//! inside them, conclusions as a row of anchors at the bottom.

use std::fmt::Write;

use crate::graph::NodeId;
use crate::structure::Qps;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn export_dot(q: &Qps) -> String {
    let mut out = String::from("digraph structure {\n");
    if q.is_empty() {
        out.push_str("}\n");
        return out;
    }
    out.push_str("  node [shape=circle];\n");
    let kids = q.forest.children_table();
    fn cluster(q: &Qps, kids: &[Vec<NodeId>], n: NodeId, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth + 1);
        let style = if q.forest.is_root(n) { "dashed" } else { "solid" };
        let _ = writeln!(out, "{pad}subgraph cluster_{n} {{");
        let _ = writeln!(out, "{pad}  style={style};");
        let _ = writeln!(out, "{pad}  label={};", quote(&format!("node {n}")));
        for v in q.vertices_in(n) {
            let _ = writeln!(out, "{pad}  v{v} [label={}];", quote(q.label(v).symbol()));
        }
        for &c in &kids[n] {
            cluster(q, kids, c, depth + 1, out);
        }
        let _ = writeln!(out, "{pad}}}");
    }
    for r in q.forest.roots() {
        cluster(q, &kids, r, 0, &mut out);
    }
    for (o, i) in q.graph.edges() {
        let (a, b) = (q.vertex_of(o), q.vertex_of(i));
        let _ = writeln!(out, "  v{a} -> v{b} [label={}];", quote(&q.ty(o).to_string()));
    }
    let tails = q.conclusions();
    for (k, &t) in tails.iter().enumerate() {
        let _ = writeln!(out, "  c{k} [shape=point, xlabel={}];", quote(&(k + 1).to_string()));
        let _ = writeln!(out, "  v{} -> c{k} [label={}];", q.vertex_of(t), quote(&q.ty(t).to_string()));
    }
    let anchors: Vec<String> = (0..tails.len()).map(|k| format!("c{k}")).collect();
    let _ = writeln!(out, "  {{ rank=sink; {}; }}", anchors.join("; "));
    if anchors.len() > 1 {
        let _ = writeln!(out, "  {} [style=invis];", anchors.join(" -> "));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::structure::AxiomMode;

    #[test]
    fn empty_structure_is_an_empty_digraph() {
        assert_eq!(export_dot(&Qps::empty(AxiomMode::Atomic)), "digraph structure {\n}\n");
    }

    #[test]
    fn roots_are_dashed_and_boxes_solid() {
        let q = fixtures::two_root_boxes();
        let dot = export_dot(&q);
        let roots = q.forest.roots().len();
        assert_eq!(dot.matches("style=dashed").count(), roots);
        assert_eq!(dot.matches("style=solid").count(), q.forest.len() - roots);
    }
}
