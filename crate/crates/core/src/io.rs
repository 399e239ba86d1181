//! Graph files: JSON with an optional frontier annotation, and DOT export.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::infinite::Truncation;

pub const GRAPH_FORMAT: &str = "prismcirc/graph/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub format: String,
    pub spec: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<String>,
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
    /// Ball vertices with neighbours outside the ball.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frontier: Vec<String>,
}

impl GraphDoc {
    pub fn of_graph(spec: &str, g: &Multigraph) -> Self {
        GraphDoc {
            format: GRAPH_FORMAT.to_string(),
            spec: spec.to_string(),
            radius: None,
            root: None,
            vertices: g.names().to_vec(),
            edges: g.edge_names(),
            frontier: Vec::new(),
        }
    }

    pub fn of_truncation(t: &Truncation) -> Self {
        GraphDoc {
            radius: Some(t.radius),
            root: Some(t.core.name(t.root).to_string()),
            frontier: t.frontier.iter().map(|&v| t.core.name(v).to_string()).collect(),
            ..GraphDoc::of_graph(&t.spec, &t.core)
        }
    }

    pub fn graph(&self) -> Result<Multigraph> {
        let g = Multigraph::new(&self.vertices, &self.edges)?;
        for v in self.frontier.iter().chain(&self.root) {
            g.id(v)?;
        }
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: GraphDoc = serde_json::from_str(s).map_err(|e| Error::Input(format!("graph json: {e}")))?;
        if doc.format != GRAPH_FORMAT {
            return Err(Error::Input(format!("unknown graph format {}", doc.format)));
        }
        doc.graph()?;
        Ok(doc)
    }

    pub fn to_dot(&self) -> String {
        let quote = |s: &str| format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""));
        let mut out = String::new();
        writeln!(out, "graph {} {{", quote(&self.spec)).unwrap();
        for v in &self.vertices {
            let mut attrs = Vec::new();
            if self.root.as_deref() == Some(v.as_str()) {
                attrs.push("shape=doublecircle");
            }
            if self.frontier.contains(v) {
                attrs.push("style=dashed");
            }
            if attrs.is_empty() {
                writeln!(out, "  {};", quote(v)).unwrap();
            } else {
                writeln!(out, "  {} [{}];", quote(v), attrs.join(", ")).unwrap();
            }
        }
        for (a, b) in &self.edges {
            writeln!(out, "  {} -- {};", quote(a), quote(b)).unwrap();
        }
        out.push_str("}\n");
        out
    }
}
