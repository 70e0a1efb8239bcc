//! Finite graphs, edge paths and circuits, and the topological
//! representatives built on top of them.

pub mod marked;
pub mod nielsen;
pub mod periodic;
pub mod pf;
pub mod rtt;
pub mod selfmap;
pub mod turns;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::words::{least_rotation, WordError};

pub use marked::MarkedGraph;
pub use selfmap::{GraphSelfMap, Stratum, StratumKind};
pub use turns::Turn;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("malformed path: edge {position} does not start where the previous one ends")]
    MalformedPath { position: usize },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("vertex `{0}` has valence one")]
    ValenceOne(String),
    #[error("first Betti number {betti} does not match rank {rank}")]
    BettiMismatch { betti: usize, rank: usize },
    #[error("bad spanning tree: {0}")]
    BadTree(String),
    #[error("bad marking: {0}")]
    BadMarking(String),
    #[error("bad image for edge `{edge}`: {reason}")]
    BadImage { edge: String, reason: String },
    #[error("bad filtration: {0}")]
    BadFiltration(String),
    #[error("image of edge `{edge}` leaves filtration level {level}")]
    FiltrationNotRespected { edge: String, level: usize },
    #[error("stratum height {0} out of range")]
    HeightOutOfRange(usize),
    #[error("stratum {height} is not exponentially growing")]
    NotExponential { height: usize },
    #[error("induced map on the fundamental group is not an automorphism: {0}")]
    NotAnAutomorphism(String),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// An oriented edge: edge index plus orientation. `Ord` is by `2*edge + reversed`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DirEdge(u32);

impl DirEdge {
    pub fn new(edge: usize, reversed: bool) -> DirEdge {
        DirEdge((2 * edge + usize::from(reversed)) as u32)
    }

    pub fn from_code(code: usize) -> DirEdge {
        DirEdge(code as u32)
    }

    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn edge(self) -> usize {
        (self.0 / 2) as usize
    }

    pub fn is_reversed(self) -> bool {
        self.0 % 2 == 1
    }

    pub fn reverse(self) -> DirEdge {
        DirEdge(self.0 ^ 1)
    }
}

impl fmt::Debug for DirEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "e{}{}",
            self.edge(),
            if self.is_reversed() { "'" } else { "" }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub name: String,
    pub from: usize,
    pub to: usize,
}

/// A finite graph with named vertices and edges. Each edge comes with its reverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertex_names: Vec<String>,
    edges: Vec<Edge>,
    at_vertex: Vec<Vec<DirEdge>>,
}

impl Graph {
    pub fn new(vertex_names: Vec<String>, edges: Vec<Edge>) -> Result<Graph, GraphError> {
        let mut seen = HashMap::new();
        for n in vertex_names.iter().chain(edges.iter().map(|e| &e.name)) {
            if seen.insert(n.clone(), ()).is_some() {
                return Err(GraphError::DuplicateName(n.clone()));
            }
        }
        for e in &edges {
            if e.from >= vertex_names.len() || e.to >= vertex_names.len() {
                return Err(GraphError::UnknownVertex(format!("endpoint of {}", e.name)));
            }
        }
        let mut g = Graph {
            vertex_names,
            edges,
            at_vertex: Vec::new(),
        };
        g.index();
        Ok(g)
    }

    fn index(&mut self) {
        let mut at = vec![Vec::new(); self.vertex_names.len()];
        for (i, e) in self.edges.iter().enumerate() {
            at[e.from].push(DirEdge::new(i, false));
            at[e.to].push(DirEdge::new(i, true));
        }
        for v in &mut at {
            v.sort();
        }
        self.at_vertex = at;
    }

    /// One vertex `v` and loops named `a, b, c, ...`.
    pub fn rose(rank: usize) -> Graph {
        let edges = (1..=rank)
            .map(|g| Edge {
                name: crate::words::Basis::default_name(g),
                from: 0,
                to: 0,
            })
            .collect();
        Graph::new(vec!["v".to_string()], edges).expect("rose is well formed")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &Edge {
        &self.edges[i]
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertex_names[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertex_names.iter().position(|n| n == name)
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }

    pub fn start(&self, d: DirEdge) -> usize {
        let e = &self.edges[d.edge()];
        if d.is_reversed() {
            e.to
        } else {
            e.from
        }
    }

    pub fn end(&self, d: DirEdge) -> usize {
        self.start(d.reverse())
    }

    /// Directions (initial oriented edges) at `v`, sorted.
    pub fn directions_at(&self, v: usize) -> &[DirEdge] {
        &self.at_vertex[v]
    }

    pub fn valence(&self, v: usize) -> usize {
        self.at_vertex[v].len()
    }

    pub fn all_directions(&self) -> impl Iterator<Item = DirEdge> {
        (0..2 * self.edges.len()).map(DirEdge::from_code)
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_names.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &d in &self.at_vertex[v] {
                let w = self.end(d);
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn first_betti_number(&self) -> usize {
        (self.edges.len() + 1).saturating_sub(self.vertex_names.len())
    }

    pub fn dir_name(&self, d: DirEdge) -> String {
        let n = &self.edges[d.edge()].name;
        if d.is_reversed() {
            format!("{n}'")
        } else {
            n.clone()
        }
    }

    pub fn format_edges(&self, edges: &[DirEdge]) -> String {
        edges
            .iter()
            .map(|&d| self.dir_name(d))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses space-separated edge names with `'` marking reversal.
    pub fn parse_edges(&self, text: &str) -> Result<Vec<DirEdge>, GraphError> {
        text.split_whitespace()
            .map(|tok| {
                let (name, rev) = match tok.strip_suffix('\'') {
                    Some(n) => (n, true),
                    None => (tok, false),
                };
                self.edge_index(name)
                    .map(|i| DirEdge::new(i, rev))
                    .ok_or_else(|| GraphError::UnknownEdge(name.to_string()))
            })
            .collect()
    }

    pub(crate) fn check_composable(&self, edges: &[DirEdge]) -> Result<(), GraphError> {
        for (i, w) in edges.windows(2).enumerate() {
            if self.end(w[0]) != self.start(w[1]) {
                return Err(GraphError::MalformedPath { position: i + 1 });
            }
        }
        Ok(())
    }
}

/// Cancels adjacent `e ē` pairs in place; `edges` must be composable.
pub(crate) fn tighten_edges(edges: &[DirEdge]) -> Vec<DirEdge> {
    let mut out: Vec<DirEdge> = Vec::with_capacity(edges.len());
    for &d in edges {
        push_tight(&mut out, d);
    }
    out
}

#[inline]
pub(crate) fn push_tight(out: &mut Vec<DirEdge>, d: DirEdge) {
    if out.last() == Some(&d.reverse()) {
        out.pop();
    } else {
        out.push(d);
    }
}

/// An edge path with an explicit start vertex, so the trivial path has a location.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct EdgePath {
    start: usize,
    edges: Vec<DirEdge>,
}

impl EdgePath {
    pub fn trivial(v: usize) -> EdgePath {
        EdgePath {
            start: v,
            edges: Vec::new(),
        }
    }

    pub fn new(g: &Graph, start: usize, edges: Vec<DirEdge>) -> Result<EdgePath, GraphError> {
        if let Some(&first) = edges.first() {
            if g.start(first) != start {
                return Err(GraphError::MalformedPath { position: 0 });
            }
        }
        g.check_composable(&edges)?;
        Ok(EdgePath { start, edges })
    }

    /// Path starting where its first edge starts.
    pub fn from_edges(g: &Graph, edges: Vec<DirEdge>) -> Result<EdgePath, GraphError> {
        let start = match edges.first() {
            Some(&d) => g.start(d),
            None => return Err(GraphError::MalformedPath { position: 0 }),
        };
        EdgePath::new(g, start, edges)
    }

    pub fn edge(g: &Graph, d: DirEdge) -> EdgePath {
        EdgePath {
            start: g.start(d),
            edges: vec![d],
        }
    }

    pub(crate) fn from_parts_unchecked(start: usize, edges: Vec<DirEdge>) -> EdgePath {
        EdgePath { start, edges }
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self, g: &Graph) -> usize {
        self.edges.last().map_or(self.start, |&d| g.end(d))
    }

    pub fn edges(&self) -> &[DirEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_closed(&self, g: &Graph) -> bool {
        self.end(g) == self.start
    }

    pub fn is_tight(&self) -> bool {
        self.edges.windows(2).all(|w| w[0] != w[1].reverse())
    }

    pub fn reverse(&self, g: &Graph) -> EdgePath {
        EdgePath {
            start: self.end(g),
            edges: self.edges.iter().rev().map(|d| d.reverse()).collect(),
        }
    }

    /// Concatenation followed by tightening. `other` must start where `self` ends.
    pub fn concat(&self, g: &Graph, other: &EdgePath) -> Result<EdgePath, GraphError> {
        if self.end(g) != other.start {
            return Err(GraphError::MalformedPath {
                position: self.len(),
            });
        }
        let mut edges = self.edges.clone();
        for &d in &other.edges {
            push_tight(&mut edges, d);
        }
        Ok(EdgePath {
            start: self.start,
            edges,
        })
    }

    pub fn format(&self, g: &Graph) -> String {
        if self.edges.is_empty() {
            format!("<{}>", g.vertex_name(self.start))
        } else {
            g.format_edges(&self.edges)
        }
    }
}

/// Tight form of `p`, homotopic rel endpoints.
pub fn tighten(g: &Graph, p: &EdgePath) -> Result<EdgePath, GraphError> {
    if let Some(&first) = p.edges.first() {
        if g.start(first) != p.start {
            return Err(GraphError::MalformedPath { position: 0 });
        }
    }
    g.check_composable(&p.edges)?;
    Ok(EdgePath {
        start: p.start,
        edges: tighten_edges(&p.edges),
    })
}

/// A cyclically tight closed path up to rotation, stored as its least rotation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default, Serialize, Deserialize)]
pub struct Circuit {
    edges: Vec<DirEdge>,
}

impl Circuit {
    /// Cyclically tightens a closed path; the trivial loop gives the empty circuit.
    pub fn from_closed(g: &Graph, p: &EdgePath) -> Result<Circuit, GraphError> {
        let t = tighten(g, p)?;
        if !t.is_closed(g) {
            return Err(GraphError::MalformedPath { position: t.len() });
        }
        Ok(Circuit::from_tight_loop(t.edges))
    }

    pub(crate) fn from_tight_loop(mut edges: Vec<DirEdge>) -> Circuit {
        let (mut i, mut j) = (0usize, edges.len());
        while j >= i + 2 && edges[i] == edges[j - 1].reverse() {
            i += 1;
            j -= 1;
        }
        let core: Vec<DirEdge> = edges.drain(i..j).collect();
        let r = least_rotation(&core);
        let mut out = Vec::with_capacity(core.len());
        out.extend_from_slice(&core[r..]);
        out.extend_from_slice(&core[..r]);
        Circuit { edges: out }
    }

    pub fn edges(&self) -> &[DirEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn reverse(&self) -> Circuit {
        Circuit::from_tight_loop(self.edges.iter().rev().map(|d| d.reverse()).collect())
    }

    /// The circuit read once around from its canonical start.
    pub fn as_path(&self, g: &Graph) -> EdgePath {
        match self.edges.first() {
            Some(&d) => EdgePath {
                start: g.start(d),
                edges: self.edges.clone(),
            },
            None => EdgePath::trivial(0),
        }
    }

    /// `copies` consecutive traversals, as a path on the periodic line.
    pub fn unrolled(&self, copies: usize) -> Vec<DirEdge> {
        let mut v = Vec::with_capacity(self.edges.len() * copies);
        for _ in 0..copies {
            v.extend_from_slice(&self.edges);
        }
        v
    }

    pub fn format(&self, g: &Graph) -> String {
        format!("[{}]", g.format_edges(&self.edges))
    }
}
