use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::graph::{GraphKind, NodeId, PropertyGraph};
use crate::layout::LayoutMap;
use crate::value::{Properties, PropertyValue};

use super::{IoError, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    kind: GraphKind,
    nodes: Vec<NodeDoc>,
    edges: Vec<EdgeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    id: u64,
    labels: BTreeSet<String>,
    properties: Properties,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    id: u64,
    source: u64,
    target: u64,
    #[serde(rename = "type")]
    rel_type: String,
    properties: Properties,
}

/// Serializes the graph as one JSON object with nodes and edges in
/// ascending id order.
pub fn to_json(g: &PropertyGraph) -> Result<String> {
    let doc = GraphDoc {
        kind: g.kind(),
        nodes: g
            .nodes()
            .map(|n| NodeDoc { id: n.id, labels: n.labels.clone(), properties: n.properties.clone() })
            .collect(),
        edges: g
            .edges()
            .map(|e| EdgeDoc {
                id: e.id,
                source: e.source,
                target: e.target,
                rel_type: e.rel_type.clone(),
                properties: e.properties.clone(),
            })
            .collect(),
    };
    serde_json::to_string(&doc).map_err(|e| IoError::Json(e.to_string()))
}

pub fn from_json(text: &str) -> Result<PropertyGraph> {
    let doc: GraphDoc =
        serde_json::from_str(text).map_err(|e| IoError::format(e.line() as u64, e.to_string()))?;
    let mut g = PropertyGraph::new(doc.kind);
    for n in doc.nodes {
        g.insert_node(n.id, n.labels, n.properties)
            .map_err(|e| IoError::format(0, format!("node {}: {e}", n.id)))?;
    }
    for e in doc.edges {
        g.insert_edge(e.id, e.source, e.target, &e.rel_type, e.properties)
            .map_err(|err| IoError::format(0, format!("edge {}: {err}", e.id)))?;
    }
    Ok(g)
}

#[derive(Serialize)]
struct LayoutDoc<'a> {
    layout: &'a str,
    positions: Vec<PositionDoc>,
}

#[derive(Serialize)]
struct PositionDoc {
    id: NodeId,
    x: f64,
    y: f64,
    label: String,
}

/// Display label for a node: its `name` property, else its labels joined
/// with `:`, else its id.
fn display_label(g: &PropertyGraph, id: NodeId) -> String {
    let Some(node) = g.node(id) else { return id.to_string() };
    match node.get("name") {
        Some(v) if !matches!(v, PropertyValue::Null) => v.to_string(),
        _ if !node.labels.is_empty() => node.labels.iter().cloned().collect::<Vec<_>>().join(":"),
        _ => id.to_string(),
    }
}

/// Layout file: `{"layout": name, "positions": [{"id", "x", "y", "label"}]}`.
pub fn layout_json(g: &PropertyGraph, name: &str, layout: &LayoutMap) -> Result<String> {
    let doc = LayoutDoc {
        layout: name,
        positions: layout
            .iter()
            .map(|(&id, p)| PositionDoc { id, x: p.x, y: p.y, label: display_label(g, id) })
            .collect(),
    };
    serde_json::to_string(&doc).map_err(|e| IoError::Json(e.to_string()))
}
