//! Canonical JSON and DOT serialization of generated cases.
//!
//! JSON output is canonical: object keys sorted, nodes ordered by id,
//! edges in parent order with children in creation order. Two runs over
//! identical inputs produce byte-identical documents. DOT output renders
//! each mode as a cluster and follows the node color conventions: open
//! goals blue, sealed goals purple, strategies green, evidence orange,
//! assumptions gray, orphaned goals red.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::engine::IterationRecord;
use crate::error::ExportError;
use crate::eval::{CoverageReport, Propagation};
use crate::gsn::{GoalStatus, GsnGraph, GsnNode, NodeId, NodeKind};
use crate::ids::ModeId;

pub const EXPORT_SCHEMA_VERSION: u32 = 1;

// ============================================================================
// Canonical JSON
// ============================================================================

/// Optional score annotations embedded into an exported graph document.
#[derive(Debug, Clone, Default)]
pub struct ScoreAnnotations {
    pub propagation: Option<Propagation>,
    pub coverage: BTreeMap<NodeId, CoverageReport>,
}

/// Serialize a graph (with optional scores) to canonical JSON.
pub fn export_json(graph: &GsnGraph, scores: Option<&ScoreAnnotations>) -> String {
    let nodes: Vec<Value> = graph
        .nodes()
        .map(|node| {
            json!({
                "id": node.id,
                "kind": node.kind,
                "label": node.label,
                "status": node.status,
                "connective": node.connective,
                "source_ref": node.source_ref,
                "mode": node.mode,
                "assumptions": node.assumptions,
            })
        })
        .collect();
    let edges: Vec<Value> = graph
        .edges()
        .map(|(from, to)| json!({ "from": from, "to": to }))
        .collect();
    let mut doc = json!({
        "schema": EXPORT_SCHEMA_VERSION,
        "root": graph.root(),
        "modes": graph.modes(),
        "has_orphans": graph.has_orphans(),
        "nodes": nodes,
        "edges": edges,
        "scores": Value::Null,
        "coverage": Value::Null,
    });
    if let Some(annotations) = scores {
        if let Some(propagation) = &annotations.propagation {
            doc["scores"] = json!({
                "root": propagation.root,
                "per_goal": propagation.per_goal,
                "orphaned": propagation.orphaned,
            });
        }
        if !annotations.coverage.is_empty() {
            doc["coverage"] =
                serde_json::to_value(&annotations.coverage).expect("coverage serializes");
        }
    }
    let mut text = serde_json::to_string_pretty(&doc).expect("graph serializes");
    text.push('\n');
    text
}

/// Parse an exported graph document. Referential integrity is checked here;
/// structural rules are left to [`GsnGraph::validate`] so defective
/// documents can still be inspected.
pub fn import_json(source: &str) -> Result<GsnGraph, ExportError> {
    #[derive(Deserialize)]
    struct EdgeDoc {
        from: NodeId,
        to: NodeId,
    }
    #[derive(Deserialize)]
    struct GraphDoc {
        schema: u32,
        root: NodeId,
        #[serde(default)]
        modes: Vec<ModeId>,
        nodes: Vec<GsnNode>,
        edges: Vec<EdgeDoc>,
    }
    let doc: GraphDoc =
        serde_json::from_str(source).map_err(|e| ExportError::Parse(e.to_string()))?;
    if doc.schema != EXPORT_SCHEMA_VERSION {
        return Err(ExportError::Parse(format!(
            "unsupported schema version {}",
            doc.schema
        )));
    }
    let graph = GsnGraph::from_parts(
        doc.root,
        doc.modes,
        doc.nodes,
        doc.edges.into_iter().map(|e| (e.from, e.to)).collect(),
    )?;
    Ok(graph)
}

/// Serialize a generation trace to canonical JSON.
pub fn export_trace(trace: &[IterationRecord]) -> String {
    let doc = json!({
        "schema": EXPORT_SCHEMA_VERSION,
        "iterations": trace,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("trace serializes");
    text.push('\n');
    text
}

// ============================================================================
// DOT
// ============================================================================

/// Shape and fill color for one node class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeStyle {
    pub shape: &'static str,
    pub fill: &'static str,
}

/// Rendering style, total over every kind/status combination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderStyle {
    pub goal_open: NodeStyle,
    pub goal_expanded: NodeStyle,
    pub goal_sealed: NodeStyle,
    pub goal_orphaned: NodeStyle,
    pub strategy: NodeStyle,
    pub assumption: NodeStyle,
    pub context: NodeStyle,
    pub evidence: NodeStyle,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            goal_open: NodeStyle {
                shape: "box",
                fill: "lightblue",
            },
            goal_expanded: NodeStyle {
                shape: "box",
                fill: "lightblue",
            },
            goal_sealed: NodeStyle {
                shape: "box",
                fill: "mediumpurple",
            },
            goal_orphaned: NodeStyle {
                shape: "box",
                fill: "orangered",
            },
            strategy: NodeStyle {
                shape: "parallelogram",
                fill: "palegreen",
            },
            assumption: NodeStyle {
                shape: "note",
                fill: "lightgray",
            },
            context: NodeStyle {
                shape: "folder",
                fill: "lightgray",
            },
            evidence: NodeStyle {
                shape: "ellipse",
                fill: "orange",
            },
        }
    }
}

impl RenderStyle {
    fn for_node(&self, node: &GsnNode) -> &NodeStyle {
        match node.kind {
            NodeKind::Goal => match node.status {
                Some(GoalStatus::Sealed) => &self.goal_sealed,
                Some(GoalStatus::Orphaned) => &self.goal_orphaned,
                Some(GoalStatus::Expanded) => &self.goal_expanded,
                _ => &self.goal_open,
            },
            NodeKind::Strategy => &self.strategy,
            NodeKind::Assumption => &self.assumption,
            NodeKind::Context => &self.context,
            NodeKind::Evidence => &self.evidence,
        }
    }
}

fn dot_escape(text: &str) -> String {
    text.replace('\\', "\\\\")
        .replace('"', "\\\"")
        .replace('\n', "\\n")
}

fn dot_node_line(node: &GsnNode, style: &RenderStyle, indent: &str) -> String {
    let node_style = style.for_node(node);
    let label = match (node.kind, node.connective) {
        (NodeKind::Strategy, Some(connective)) => {
            format!("[{}] {}", connective, node.label)
        }
        _ => node.label.clone(),
    };
    format!(
        "{indent}\"{}\" [label=\"{}\", shape={}, fillcolor=\"{}\", style=filled];\n",
        dot_escape(node.id.as_str()),
        dot_escape(&label),
        node_style.shape,
        node_style.fill,
    )
}

/// Emit the graph as a DOT digraph with one cluster per mode.
pub fn export_dot(graph: &GsnGraph, style: &RenderStyle) -> String {
    let mut out = String::new();
    out.push_str("digraph gsn_case {\n");
    out.push_str("  rankdir=TB;\n");

    // Shared scope first, then one cluster per declared mode.
    for node in graph.nodes().filter(|n| n.mode.is_none()) {
        out.push_str(&dot_node_line(node, style, "  "));
    }
    for mode in graph.modes() {
        out.push_str(&format!(
            "  subgraph \"cluster_{}\" {{\n",
            dot_escape(mode.as_str())
        ));
        out.push_str(&format!("    label=\"{}\";\n", dot_escape(mode.as_str())));
        for node in graph.nodes().filter(|n| n.mode.as_ref() == Some(mode)) {
            out.push_str(&dot_node_line(node, style, "    "));
        }
        out.push_str("  }\n");
    }
    for (from, to) in graph.edges() {
        out.push_str(&format!(
            "  \"{}\" -> \"{}\";\n",
            dot_escape(from.as_str()),
            dot_escape(to.as_str())
        ));
    }
    out.push_str("}\n");
    out
}
