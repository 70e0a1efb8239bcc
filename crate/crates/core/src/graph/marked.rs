//! Marked graphs: a spanning tree plus a word label on every non-tree edge.
//!
//! The label of a non-tree edge `e` from `u` to `v` is the word of the loop
//! `τ(u) · e · τ(v)⁻¹`, where `τ(x)` is the tree path from the base vertex.
//! Tree edges carry the empty label, so the word of any path is the reduced
//! product of the labels it crosses.

use std::collections::{BTreeMap, VecDeque};

use super::{push_tight, Circuit, DirEdge, EdgePath, Graph, GraphError};
use crate::words::{push_reduced, CyclicWord, FreeAutomorphism, Letter, ReducedWord};

#[derive(Clone, Debug)]
pub struct MarkedGraph {
    graph: Graph,
    base: usize,
    rank: usize,
    in_tree: Vec<bool>,
    labels: Vec<ReducedWord>,
    /// non-tree edges in increasing index order
    nontree: Vec<usize>,
    /// tree path from the base to each vertex
    tree_paths: Vec<Vec<DirEdge>>,
    /// `x_j ↦ label(nontree[j])`, with verified inverse
    label_map: FreeAutomorphism,
}

impl MarkedGraph {
    /// `labels` maps each non-tree edge to its word. `base` is the root of the tree.
    pub fn new(
        graph: Graph,
        base: usize,
        tree_edges: &[usize],
        labels: &BTreeMap<usize, ReducedWord>,
        rank: usize,
    ) -> Result<MarkedGraph, GraphError> {
        if !graph.is_connected() {
            return Err(GraphError::Disconnected);
        }
        for v in 0..graph.vertex_count() {
            if graph.valence(v) == 1 {
                return Err(GraphError::ValenceOne(graph.vertex_name(v).to_string()));
            }
        }
        let betti = graph.first_betti_number();
        if betti != rank {
            return Err(GraphError::BettiMismatch { betti, rank });
        }
        if base >= graph.vertex_count() {
            return Err(GraphError::UnknownVertex(format!("base {base}")));
        }
        let mut in_tree = vec![false; graph.edge_count()];
        for &e in tree_edges {
            if e >= graph.edge_count() || in_tree[e] {
                return Err(GraphError::BadTree(format!(
                    "edge index {e} invalid or repeated"
                )));
            }
            in_tree[e] = true;
        }
        if tree_edges.len() + 1 != graph.vertex_count() {
            return Err(GraphError::BadTree(format!(
                "{} edges cannot span {} vertices",
                tree_edges.len(),
                graph.vertex_count()
            )));
        }
        let tree_paths = tree_paths(&graph, base, &in_tree)?;

        let nontree: Vec<usize> = (0..graph.edge_count()).filter(|&e| !in_tree[e]).collect();
        let mut label_vec = vec![ReducedWord::identity(); graph.edge_count()];
        let mut images = Vec::with_capacity(rank);
        for &e in &nontree {
            let w = labels.get(&e).ok_or_else(|| {
                GraphError::BadMarking(format!("no label for edge `{}`", graph.edge(e).name))
            })?;
            if w.max_generator() > rank {
                return Err(GraphError::BadMarking(format!(
                    "label of `{}` exceeds rank",
                    graph.edge(e).name
                )));
            }
            label_vec[e] = w.clone();
            images.push(w.clone());
        }
        for e in labels.keys() {
            if *e >= graph.edge_count() || in_tree[*e] {
                return Err(GraphError::BadMarking(format!(
                    "label given for tree or unknown edge {e}"
                )));
            }
        }
        let label_map = FreeAutomorphism::new(images)?
            .invert(10_000)
            .map_err(|e| GraphError::BadMarking(format!("labels do not form a basis: {e}")))?;
        Ok(MarkedGraph {
            graph,
            base,
            rank,
            in_tree,
            labels: label_vec,
            nontree,
            tree_paths,
            label_map,
        })
    }

    /// The rose with its standard identification: loop `i` reads generator `i`.
    pub fn identity_rose(rank: usize) -> MarkedGraph {
        let g = Graph::rose(rank);
        let labels = (0..rank)
            .map(|i| (i, ReducedWord::letter(Letter::new(i + 1, false))))
            .collect();
        MarkedGraph::new(g, 0, &[], &labels, rank).expect("standard rose marking")
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn in_tree(&self, e: usize) -> bool {
        self.in_tree[e]
    }

    pub fn tree_edges(&self) -> Vec<usize> {
        (0..self.graph.edge_count())
            .filter(|&e| self.in_tree[e])
            .collect()
    }

    pub fn label(&self, e: usize) -> &ReducedWord {
        &self.labels[e]
    }

    pub fn nontree_edges(&self) -> &[usize] {
        &self.nontree
    }

    pub fn tree_path(&self, v: usize) -> &[DirEdge] {
        &self.tree_paths[v]
    }

    /// Reduced product of labels along `edges`.
    pub fn word_of(&self, edges: &[DirEdge]) -> ReducedWord {
        let mut buf = Vec::new();
        for &d in edges {
            let l = &self.labels[d.edge()];
            if d.is_reversed() {
                for &x in l.letters().iter().rev() {
                    push_reduced(&mut buf, x.inverse());
                }
            } else {
                for &x in l.letters() {
                    push_reduced(&mut buf, x);
                }
            }
        }
        ReducedWord::from_letters(buf)
    }

    pub fn class_of(&self, c: &Circuit) -> CyclicWord {
        CyclicWord::from_word(&self.word_of(c.edges()))
    }

    /// Loop at the base realizing label word `y_j = label(nontree[j])`.
    fn label_loop(&self, j: usize, inverse: bool) -> Vec<DirEdge> {
        let e = self.nontree[j];
        let ed = self.graph.edge(e);
        let mut p: Vec<DirEdge> = self.tree_paths[ed.from].clone();
        p.push(DirEdge::new(e, false));
        for &d in self.tree_paths[ed.to].iter().rev() {
            p.push(d.reverse());
        }
        if inverse {
            p.reverse();
            for d in &mut p {
                *d = d.reverse();
            }
        }
        p
    }

    /// Tight loop at the base vertex whose word is `w`.
    pub fn realize_word(&self, w: &ReducedWord) -> EdgePath {
        let psi = self
            .label_map
            .inverse()
            .expect("label map carries its inverse");
        let mut edges = Vec::new();
        for &l in w.letters() {
            // x_i = psi(x_i) written in the label words y_j
            let expr = psi.apply_letter(l);
            for &y in expr.letters() {
                for d in self.label_loop(y.generator() - 1, y.is_inverse()) {
                    push_tight(&mut edges, d);
                }
            }
        }
        EdgePath::from_parts_unchecked(self.base, edges)
    }

    pub fn realize_class(&self, c: &CyclicWord) -> Circuit {
        Circuit::from_tight_loop(self.realize_word(&c.to_word()).edges().to_vec())
    }
}

fn tree_paths(g: &Graph, base: usize, in_tree: &[bool]) -> Result<Vec<Vec<DirEdge>>, GraphError> {
    let mut paths: Vec<Option<Vec<DirEdge>>> = vec![None; g.vertex_count()];
    paths[base] = Some(Vec::new());
    let mut queue = VecDeque::from([base]);
    let mut used = 0usize;
    while let Some(v) = queue.pop_front() {
        for &d in g.directions_at(v) {
            if !in_tree[d.edge()] {
                continue;
            }
            let w = g.end(d);
            if paths[w].is_none() {
                let mut p = paths[v].clone().unwrap();
                p.push(d);
                paths[w] = Some(p);
                used += 1;
                queue.push_back(w);
            }
        }
    }
    if paths.iter().any(|p| p.is_none()) {
        return Err(GraphError::BadTree(
            "tree does not reach every vertex".into(),
        ));
    }
    if used + 1 != g.vertex_count() {
        return Err(GraphError::BadTree("tree contains a cycle".into()));
    }
    Ok(paths.into_iter().map(|p| p.unwrap()).collect())
}
