//! JSON description of a topological representative on a marked graph.
//!
//! ```json
//! {
//!   "name": "e1",
//!   "vertices": ["v"],
//!   "edges": [{"name": "a", "from": "v", "to": "v"}, ...],
//!   "base": "v",
//!   "tree": [],
//!   "labels": {"a": "a", "b": "b", "c": "c"},
//!   "images": {"a": "a b", "b": "a", "c": "c"},
//!   "filtration": [["c"], ["a", "b", "c"]]
//! }
//! ```
//!
//! `labels` give the marking of the non-tree edges as words in the basis;
//! `images` are edge paths written with edge names.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::parse::{parse_word, ParseError};
use crate::graph::{Edge, Graph, GraphError, GraphSelfMap, MarkedGraph};
use crate::words::Basis;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub name: String,
    pub from: String,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphMapSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    pub base: String,
    #[serde(default)]
    pub tree: Vec<String>,
    pub labels: BTreeMap<String, String>,
    pub images: BTreeMap<String, String>,
    #[serde(default)]
    pub vertex_images: Option<BTreeMap<String, String>>,
    /// cumulative edge lists `G_1 ⊂ … ⊂ G_k`; a single stratum when absent
    #[serde(default)]
    pub filtration: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphMapError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("label of `{edge}`: {source}")]
    Label { edge: String, source: ParseError },
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("no image for edge `{0}`")]
    MissingImage(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl GraphMapSpec {
    pub fn from_json(text: &str) -> Result<GraphMapSpec, GraphMapError> {
        serde_json::from_str(text).map_err(|e| GraphMapError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    pub fn build(&self) -> Result<GraphSelfMap, GraphMapError> {
        let vid = |n: &str| {
            self.vertices
                .iter()
                .position(|v| v == n)
                .ok_or_else(|| GraphMapError::Unknown {
                    kind: "vertex",
                    name: n.to_string(),
                })
        };
        let edges = self
            .edges
            .iter()
            .map(|e| {
                Ok(Edge {
                    name: e.name.clone(),
                    from: vid(&e.from)?,
                    to: vid(&e.to)?,
                })
            })
            .collect::<Result<Vec<_>, GraphMapError>>()?;
        let graph = Graph::new(self.vertices.clone(), edges)?;
        let eid = |n: &str| {
            graph.edge_index(n).ok_or_else(|| GraphMapError::Unknown {
                kind: "edge",
                name: n.to_string(),
            })
        };
        let rank = graph.first_betti_number();
        let tree = self
            .tree
            .iter()
            .map(|n| eid(n))
            .collect::<Result<Vec<_>, _>>()?;
        let mut labels = BTreeMap::new();
        for (edge, word) in &self.labels {
            let w = parse_word(word, rank).map_err(|source| GraphMapError::Label {
                edge: edge.clone(),
                source,
            })?;
            labels.insert(eid(edge)?, w);
        }
        let marked = MarkedGraph::new(graph.clone(), vid(&self.base)?, &tree, &labels, rank)?;
        for name in self.images.keys() {
            eid(name)?;
        }
        let images = graph
            .edges()
            .iter()
            .map(|e| {
                let text = self
                    .images
                    .get(&e.name)
                    .ok_or_else(|| GraphMapError::MissingImage(e.name.clone()))?;
                Ok(graph.parse_edges(text)?)
            })
            .collect::<Result<Vec<_>, GraphMapError>>()?;
        let vertex_images = match &self.vertex_images {
            None => None,
            Some(m) => Some(
                self.vertices
                    .iter()
                    .map(|v| {
                        let img = m.get(v).ok_or_else(|| GraphMapError::Unknown {
                            kind: "vertex image of",
                            name: v.clone(),
                        })?;
                        vid(img)
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };
        let filtration = match &self.filtration {
            None => vec![(0..graph.edge_count()).collect()],
            Some(levels) => levels
                .iter()
                .map(|l| l.iter().map(|n| eid(n)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?,
        };
        let name = self.name.clone().unwrap_or_else(|| "f".into());
        Ok(GraphSelfMap::new(
            name,
            marked,
            vertex_images,
            images,
            &filtration,
        )?)
    }

    /// The description of an existing map, with the standard basis names.
    pub fn describe(f: &GraphSelfMap) -> GraphMapSpec {
        let m = f.marked();
        let g = m.graph();
        let basis = Basis::standard(m.rank());
        let names = |es: &[usize]| {
            es.iter()
                .map(|&e| g.edge(e).name.clone())
                .collect::<Vec<_>>()
        };
        GraphMapSpec {
            name: Some(f.name().to_string()),
            vertices: g.vertex_names().to_vec(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeSpec {
                    name: e.name.clone(),
                    from: g.vertex_name(e.from).to_string(),
                    to: g.vertex_name(e.to).to_string(),
                })
                .collect(),
            base: g.vertex_name(m.base()).to_string(),
            tree: names(&m.tree_edges()),
            labels: m
                .nontree_edges()
                .iter()
                .map(|&e| (g.edge(e).name.clone(), basis.format(m.label(e))))
                .collect(),
            images: (0..g.edge_count())
                .map(|e| (g.edge(e).name.clone(), g.format_edges(f.edge_image(e))))
                .collect(),
            vertex_images: Some(
                (0..g.vertex_count())
                    .map(|v| {
                        (
                            g.vertex_name(v).to_string(),
                            g.vertex_name(f.vertex_image(v)).to_string(),
                        )
                    })
                    .collect(),
            ),
            filtration: Some(f.filtration().iter().map(|l| names(l)).collect()),
        }
    }
}
