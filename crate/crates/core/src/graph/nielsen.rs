//! Exhaustive bounded search for periodic Nielsen paths.

use serde::{Deserialize, Serialize};

use super::{DirEdge, GraphSelfMap};
use crate::par::{self, Execution};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NielsenPath {
    pub start: usize,
    pub edges: Vec<DirEdge>,
    /// least `k ≥ 1` with `f^k_#(p) = p`
    pub period: usize,
}

/// Least `k ≤ period_bound` with `f^k_#(p) = p`, endpoints included.
pub fn nielsen_period(
    f: &GraphSelfMap,
    start: usize,
    edges: &[DirEdge],
    period_bound: usize,
) -> Option<usize> {
    let g = f.graph();
    let end = if edges.is_empty() {
        start
    } else {
        g.end(*edges.last().unwrap())
    };
    let (mut s, mut e) = (start, end);
    let mut cur = edges.to_vec();
    for k in 1..=period_bound {
        cur = f.map_edges(&cur);
        s = f.vertex_image(s);
        e = f.vertex_image(e);
        if s == start && e == end && cur == edges {
            return Some(k);
        }
    }
    None
}

/// Every nontrivial tight path of length `≤ length_bound` that is fixed by some
/// `f^k_#` with `k ≤ period_bound`, sorted by (start, edges).
pub fn find_nielsen_paths(
    f: &GraphSelfMap,
    length_bound: usize,
    period_bound: usize,
) -> Vec<NielsenPath> {
    find_nielsen_paths_with(f, length_bound, period_bound, Execution::default())
}

pub fn find_nielsen_paths_with(
    f: &GraphSelfMap,
    length_bound: usize,
    period_bound: usize,
    exec: Execution,
) -> Vec<NielsenPath> {
    let g = f.graph();
    let firsts: Vec<DirEdge> = g.all_directions().collect();
    let mut out: Vec<NielsenPath> = par::map(exec, &firsts, |&d| {
        let mut found = Vec::new();
        let mut stack = vec![vec![d]];
        while let Some(p) = stack.pop() {
            let start = g.start(p[0]);
            if let Some(period) = nielsen_period(f, start, &p, period_bound) {
                found.push(NielsenPath {
                    start,
                    edges: p.clone(),
                    period,
                });
            }
            if p.len() < length_bound {
                let last = *p.last().unwrap();
                for &x in g.directions_at(g.end(last)) {
                    if x != last.reverse() {
                        let mut q = p.clone();
                        q.push(x);
                        stack.push(q);
                    }
                }
            }
        }
        found
    })
    .into_iter()
    .flatten()
    .collect();
    out.sort();
    out
}

/// Whether a fixed path splits as a concatenation of two nontrivial paths
/// each fixed by `f^period_#`.
pub fn is_divisible(f: &GraphSelfMap, p: &NielsenPath) -> bool {
    let g = f.graph();
    (1..p.edges.len()).any(|i| {
        let mid = g.end(p.edges[i - 1]);
        let fixed = |s: usize, e: &[DirEdge]| {
            let mut cur = e.to_vec();
            let mut v = s;
            for _ in 0..p.period {
                cur = f.map_edges(&cur);
                v = f.vertex_image(v);
            }
            v == s && cur == e
        };
        fixed(p.start, &p.edges[..i]) && fixed(mid, &p.edges[i..])
    })
}

/// Closed, indivisible, period-one Nielsen paths of height exactly `r`.
/// Of each path and its reverse only the lexicographically smaller one is kept.
pub fn closed_indivisible(f: &GraphSelfMap, r: usize, paths: &[NielsenPath]) -> Vec<NielsenPath> {
    let g = f.graph();
    let mut out: Vec<NielsenPath> = paths
        .iter()
        .filter(|p| p.period == 1)
        .filter(|p| g.end(*p.edges.last().unwrap()) == p.start)
        .filter(|p| f.height_of(&p.edges) == r)
        .filter(|p| !is_divisible(f, p))
        .filter(|p| {
            let rev: Vec<DirEdge> = p.edges.iter().rev().map(|d| d.reverse()).collect();
            p.edges <= rev
        })
        .cloned()
        .collect();
    out.sort();
    out.dedup();
    out
}
