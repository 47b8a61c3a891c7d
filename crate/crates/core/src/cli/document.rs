//! The JSON interchange format for structures, sets of structures and glue
//! certificates.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::Formula;
use crate::glue::{GlueCertificate, Membership};
use crate::graph::{Flag, Label, NodeId, Orient, RootedForest, StructuredGraph, Vertex};
use crate::rewrite::format_path;
use crate::structure::{AxiomMode, Qps};
use crate::taylor::ThickSubforest;

/// A structure. Flags are numbered vertex by vertex, inputs before outputs,
/// so the order of a cell's inputs and outputs is the order of their ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub mode: AxiomMode,
    pub structure: StructureDoc,
    pub forest: ForestDoc,
    #[serde(rename = "box")]
    pub boxes: BoxDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureDoc {
    pub vertices: Vec<VertexDoc>,
    pub flags: Vec<FlagDoc>,
    /// Conclusions in order, then the glued flags vertex by vertex.
    pub order: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDoc {
    pub id: usize,
    pub label: Label,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagDoc {
    pub id: usize,
    pub vertex: usize,
    #[serde(rename = "type")]
    pub ty: Formula,
    pub orient: Orient,
    pub partner: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForestDoc {
    pub nodes: Vec<NodeDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: usize,
    pub parent: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxDoc {
    /// Forest node of each vertex.
    pub vertices: BTreeMap<usize, usize>,
    /// For each edge, keyed by its output flag, the forest path it follows.
    pub edges: BTreeMap<usize, Vec<usize>>,
    /// Root node of each conclusion flag.
    pub conclusions: BTreeMap<usize, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetDocument {
    pub elements: Vec<Document>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDocument {
    pub path: String,
    #[serde(rename = "R")]
    pub r: Document,
    pub witnesses: Vec<WitnessDoc>,
}

/// How element `element` of the set sits in the expansion of `R`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessDoc {
    pub element: usize,
    pub subforest: SubforestDoc,
    pub emptied: Vec<NodeId>,
    pub routed: Vec<usize>,
    pub plain: bool,
}

/// A thick subforest: its own nodes and the node of `R` each one copies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubforestDoc {
    pub nodes: Vec<NodeDoc>,
    pub image: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{at}: {reason}")]
pub struct DocError {
    /// Where in the document, as a dotted path.
    pub at: String,
    pub reason: String,
}

fn err<T>(at: impl Into<String>, reason: impl Into<String>) -> Result<T, DocError> {
    Err(DocError { at: at.into(), reason: reason.into() })
}

impl Document {
    /// The canonical document of `q`.
    pub fn from_qps(q: &Qps) -> Document {
        // Renumber flags vertex by vertex, inputs first.
        let g = &q.graph;
        let mut new_id = vec![0; g.flags.len()];
        let mut old_of = vec![];
        for v in &g.vertices {
            for &f in v.inputs.iter().chain(&v.outputs) {
                new_id[f] = old_of.len();
                old_of.push(f);
            }
        }
        let flags = old_of
            .iter()
            .enumerate()
            .map(|(id, &f)| {
                let fl = &g.flags[f];
                FlagDoc { id, vertex: fl.vertex, ty: fl.ty.clone(), orient: fl.orient, partner: fl.partner.map(|p| new_id[p]) }
            })
            .collect();
        let order = g.order().into_iter().map(|f| new_id[f]).collect();
        let vertices = g.vertices.iter().enumerate().map(|(id, v)| VertexDoc { id, label: v.label }).collect();
        let nodes = q.forest.parent.iter().enumerate().map(|(id, &parent)| NodeDoc { id, parent }).collect();
        let edges = g
            .edges()
            .map(|(out, _)| (new_id[out], q.edge_path(out).unwrap_or_default()))
            .collect();
        let conclusions =
            g.tails.iter().map(|&t| (new_id[t], q.forest.root_of(q.boxes[g.flags[t].vertex]))).collect();
        Document {
            mode: q.mode,
            structure: StructureDoc { vertices, flags, order },
            forest: ForestDoc { nodes },
            boxes: BoxDoc { vertices: q.boxes.iter().copied().enumerate().collect(), edges, conclusions },
        }
    }

    /// The structure described, after checking the document is consistent.
    /// Validity against the typing rules is left to `validate_classify`.
    pub fn to_qps(&self) -> Result<Qps, DocError> {
        let s = &self.structure;
        let n = s.vertices.len();
        let m = s.flags.len();
        for (k, v) in s.vertices.iter().enumerate() {
            if v.id != k {
                return err(format!("structure.vertices[{k}].id"), format!("expected {k}, ids must be 0, 1, ... in order"));
            }
        }
        let mut vertices: Vec<Vertex> =
            s.vertices.iter().map(|v| Vertex { label: v.label, inputs: vec![], outputs: vec![] }).collect();
        let mut flags = vec![];
        for (k, f) in s.flags.iter().enumerate() {
            let at = format!("structure.flags[{k}]");
            if f.id != k {
                return err(format!("{at}.id"), format!("expected {k}, ids must be 0, 1, ... in order"));
            }
            if f.vertex >= n {
                return err(format!("{at}.vertex"), format!("no vertex {}", f.vertex));
            }
            if let Some(p) = f.partner {
                let Some(pf) = s.flags.get(p) else { return err(format!("{at}.partner"), format!("no flag {p}")) };
                if p == k || pf.partner != Some(k) {
                    return err(format!("{at}.partner"), "partners must be mutual and distinct");
                }
                if pf.ty != f.ty || pf.orient == f.orient {
                    return err(format!("{at}.partner"), "an edge joins an output and an input of the same type");
                }
            }
            match f.orient {
                Orient::In => vertices[f.vertex].inputs.push(k),
                Orient::Out => vertices[f.vertex].outputs.push(k),
            }
            flags.push(Flag { vertex: f.vertex, ty: f.ty.clone(), orient: f.orient, partner: f.partner });
        }
        let mut seen = vec![false; m];
        for (k, &f) in s.order.iter().enumerate() {
            if f >= m || std::mem::replace(&mut seen[f], true) {
                return err(format!("structure.order[{k}]"), format!("flag {f} is missing or repeated"));
            }
        }
        if seen.iter().any(|b| !b) {
            return err("structure.order", "must list every flag once");
        }
        let tails = s.order.iter().copied().filter(|&f| flags[f].partner.is_none()).collect();
        let graph = StructuredGraph { vertices, flags, tails };
        if graph.order() != s.order {
            return err("structure.order", "conclusions first, then glued flags vertex by vertex, inputs first");
        }

        let mut forest = RootedForest::new();
        for (k, nd) in self.forest.nodes.iter().enumerate() {
            if nd.id != k {
                return err(format!("forest.nodes[{k}].id"), format!("expected {k}, ids must be 0, 1, ... in order"));
            }
            if nd.parent.is_some_and(|p| p >= self.forest.nodes.len()) {
                return err(format!("forest.nodes[{k}].parent"), "no such node");
            }
            forest.parent.push(nd.parent);
        }
        if !forest.is_acyclic() {
            return err("forest.nodes", "the parent relation has a cycle");
        }

        let b = &self.boxes;
        if b.vertices.len() != n || b.vertices.keys().enumerate().any(|(k, &v)| k != v) {
            return err("box.vertices", "must map every vertex");
        }
        if let Some((v, node)) = b.vertices.iter().find(|(_, &node)| node >= forest.len()) {
            return err(format!("box.vertices.{v}"), format!("no node {node}"));
        }
        let boxes: Vec<NodeId> = b.vertices.values().copied().collect();
        let q = Qps { mode: self.mode, graph, forest, boxes };

        let outs: Vec<usize> = q.graph.edges().map(|(o, _)| o).collect();
        if b.edges.len() != outs.len() || outs.iter().any(|o| !b.edges.contains_key(o)) {
            return err("box.edges", "must have one entry per edge, keyed by its output flag");
        }
        for &o in &outs {
            if let Some(p) = q.edge_path(o) {
                if b.edges[&o] != p {
                    return err(format!("box.edges.{o}"), format!("the edge follows the forest path {p:?}"));
                }
            }
        }
        let tails = q.conclusions();
        if b.conclusions.len() != tails.len() || tails.iter().any(|t| !b.conclusions.contains_key(t)) {
            return err("box.conclusions", "must have one entry per conclusion");
        }
        for &t in tails {
            let root = q.forest.root_of(q.boxes[q.graph.flags[t].vertex]);
            if b.conclusions[&t] != root {
                return err(format!("box.conclusions.{t}"), format!("the conclusion's vertex lies under root {root}"));
            }
        }
        Ok(q)
    }
}

impl SetDocument {
    pub fn from_set(set: &[Qps]) -> SetDocument {
        SetDocument { elements: set.iter().map(Document::from_qps).collect() }
    }

    /// The elements, checked to share one type.
    pub fn to_set(&self) -> Result<Vec<Qps>, DocError> {
        let mut out: Vec<Qps> = vec![];
        for (k, d) in self.elements.iter().enumerate() {
            let q = d.to_qps().map_err(|e| DocError { at: format!("elements[{k}].{}", e.at), reason: e.reason })?;
            if let Some(first) = out.first() {
                if first.type_of() != q.type_of() {
                    return err(format!("elements[{k}]"), format!("type {} differs from {}", q.type_of(), first.type_of()));
                }
            }
            out.push(q);
        }
        Ok(out)
    }
}

impl SubforestDoc {
    pub fn from_subforest(t: &ThickSubforest) -> SubforestDoc {
        let nodes = t.sigma.parent.iter().enumerate().map(|(id, &parent)| NodeDoc { id, parent }).collect();
        SubforestDoc { nodes, image: t.h.clone() }
    }

    pub fn to_subforest(&self) -> ThickSubforest {
        ThickSubforest { sigma: RootedForest { parent: self.nodes.iter().map(|n| n.parent).collect() }, h: self.image.clone() }
    }
}

impl WitnessDoc {
    pub fn from_membership(element: usize, m: &Membership) -> WitnessDoc {
        WitnessDoc {
            element,
            subforest: SubforestDoc::from_subforest(&m.subforest),
            emptied: m.emptied.clone(),
            routed: m.routed.clone(),
            plain: m.plain,
        }
    }
}

impl CertificateDocument {
    pub fn from_certificate(c: &GlueCertificate) -> CertificateDocument {
        CertificateDocument {
            path: format_path(&c.path),
            r: Document::from_qps(&c.witness),
            witnesses: c.memberships.iter().enumerate().map(|(k, m)| WitnessDoc::from_membership(k, m)).collect(),
        }
    }
}
